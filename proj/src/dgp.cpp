#include "qsel/dgp.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "qsel/csv.hpp"
#include "qsel/parallel.hpp"
#include "qsel/qscore.hpp"

namespace qsel {

std::string to_string(Design d) {
  switch (d) {
    case Design::Pentagon5: return "pentagon5";
    case Design::T52D: return "t52d";
    case Design::T510D: return "t510d";
    case Design::Flower2: return "flower2";
    case Design::Uniform: return "uniform";
    case Design::DgpG: return "dgpG";
    case Design::DgpU: return "dgpU";
  }
  return "?";
}

Design design_from_string(const std::string& s) {
  if (s == "pentagon5" || s == "Pentagon5") return Design::Pentagon5;
  if (s == "t52d" || s == "T52D") return Design::T52D;
  if (s == "t510d" || s == "T510D") return Design::T510D;
  if (s == "flower2" || s == "Flower2") return Design::Flower2;
  if (s == "uniform" || s == "Uniform") return Design::Uniform;
  if (s == "dgpG" || s == "dgpg") return Design::DgpG;
  if (s == "dgpU" || s == "dgpu") return Design::DgpU;
  throw ConfigError("unknown design: " + s);
}

namespace {

Eigen::Matrix2d rotation_cw(double degrees) {
  // Clockwise by `degrees`: the usual rotation matrix evaluated at -theta.
  const double t = -degrees * std::numbers::pi / 180.0;
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

struct MixtureComponent {
  double pi;
  Eigen::VectorXd mu;
  Eigen::MatrixXd cov;            // covariance (not the t scale matrix)
  double student_nu = 0.0;        // 0 = Gaussian
};

std::vector<MixtureComponent> pentagon5_components() {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  std::vector<MixtureComponent> comps(5);
  const double pis[5] = {0.2, 0.35, 0.35, 0.05, 0.05};
  const double mus[5][2] = {{0, 5}, {-4.5, -0.5}, {4.5, -0.5}, {3, -2.5}, {-3, -2.5}};
  for (int k = 0; k < 5; ++k) {
    comps[static_cast<std::size_t>(k)].pi = pis[k];
    comps[static_cast<std::size_t>(k)].mu = Eigen::Vector2d(mus[k][0], mus[k][1]);
    comps[static_cast<std::size_t>(k)].cov = eye;
  }
  return comps;
}

std::vector<MixtureComponent> t52d_components() {
  std::vector<MixtureComponent> comps(5);
  const double pis[5] = {0.15, 0.4, 0.05, 0.15, 0.25};
  const double nus[5] = {10, 12, 14, 16, 18};
  const double mus[5][2] = {{0, 3}, {7, 1}, {5, 9}, {-11, 11}, {-7, 5}};
  const double covs[5][3] = {  // (s11, s12, s22)
      {1, 0.5, 1}, {2, -1.5, 2}, {2, 1.3, 2}, {0.5, 0, 0.5}, {2.5, 0, 2.5}};
  for (int k = 0; k < 5; ++k) {
    auto& c = comps[static_cast<std::size_t>(k)];
    c.pi = pis[k];
    c.student_nu = nus[k];
    c.mu = Eigen::Vector2d(mus[k][0], mus[k][1]);
    c.cov.resize(2, 2);
    c.cov << covs[k][0], covs[k][1], covs[k][1], covs[k][2];
  }
  return comps;
}

int draw_component(const std::vector<MixtureComponent>& comps, SeededRng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    acc += comps[k].pi;
    if (u <= acc) return static_cast<int>(k);
  }
  return static_cast<int>(comps.size()) - 1;
}

// Student-t parameterized by its covariance: scale = cov (nu-2)/nu.
Eigen::VectorXd draw_student_t(const Eigen::VectorXd& mu, const Eigen::MatrixXd& chol_scale,
                               double nu, SeededRng& rng) {
  Eigen::VectorXd z(mu.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  const double w = rng.chi_squared(nu);
  return mu + chol_scale * z * std::sqrt(nu / w);
}

DataMatrix sample_mixture(const std::vector<MixtureComponent>& comps, int n, SeededRng& rng) {
  const int p = static_cast<int>(comps.front().mu.size());
  std::vector<Eigen::MatrixXd> chol(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    Eigen::MatrixXd scale = comps[k].cov;
    if (comps[k].student_nu > 0.0) scale *= (comps[k].student_nu - 2.0) / comps[k].student_nu;
    chol[k] = Eigen::LLT<Eigen::MatrixXd>(scale).matrixL();
  }
  DataMatrix data;
  data.values.resize(n, p);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int k = draw_component(comps, rng);
    labels[static_cast<std::size_t>(i)] = k;
    const auto& c = comps[static_cast<std::size_t>(k)];
    Eigen::VectorXd x;
    if (c.student_nu > 0.0) {
      x = draw_student_t(c.mu, chol[static_cast<std::size_t>(k)], c.student_nu, rng);
    } else {
      x = rng.normal_vector(c.mu, chol[static_cast<std::size_t>(k)]);
    }
    data.values.row(i) = x.transpose();
  }
  data.labels = std::move(labels);
  return data;
}

DataMatrix sample_t510d(int n, SeededRng& rng) {
  // T52D on the first two coordinates plus 8 independent standard-normal ones.
  DataMatrix base = sample_mixture(t52d_components(), n, rng);
  DataMatrix data;
  data.values.resize(n, 10);
  data.values.leftCols(2) = base.values;
  for (int i = 0; i < n; ++i) {
    for (int j = 2; j < 10; ++j) data.values(i, j) = rng.normal();
  }
  data.labels = base.labels;
  return data;
}

DataMatrix sample_flower2(int n, SeededRng& rng) {
  DataMatrix data;
  data.values.resize(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));

  const Eigen::Matrix2d rect_cw = rotation_cw(45.0);
  const Eigen::Matrix2d rect_ccw = rotation_cw(-45.0);
  const Eigen::Matrix2d t_cw = rotation_cw(135.0);
  const Eigen::Matrix2d t_ccw = rotation_cw(-135.0);
  Eigen::Matrix2d t_cov;
  t_cov << 1, 0, 0, 10;
  const Eigen::MatrixXd t_chol =
      Eigen::LLT<Eigen::MatrixXd>((t_cov * (9.0 - 2.0) / 9.0).eval()).matrixL();
  const Eigen::Vector2d t_center(0, 5);

  for (int i = 0; i < n; ++i) {
    const int k = static_cast<int>(rng.uniform_int(5));
    labels[static_cast<std::size_t>(i)] = k;
    Eigen::Vector2d x;
    switch (k) {
      case 0:
      case 1: {
        // Rectangle x in [-1,1], y in [1,10], rotated about the origin.
        const Eigen::Vector2d q(rng.uniform(-1.0, 1.0), rng.uniform(1.0, 10.0));
        x = (k == 0 ? rect_cw : rect_ccw) * q;
        break;
      }
      case 2:
      case 3: {
        // Student-t (nu=9) scatter rotated about its center.
        const Eigen::VectorXd z = draw_student_t(Eigen::Vector2d::Zero(), t_chol, 9.0, rng);
        x = (k == 2 ? t_cw : t_ccw) * z + t_center;
        break;
      }
      default: {
        x = Eigen::Vector2d(rng.normal(), rng.normal());
        break;
      }
    }
    data.values.row(i) = x.transpose();
  }
  data.labels = std::move(labels);
  return data;
}

std::vector<MixtureComponent> dgp_g_components(double d) {
  std::vector<MixtureComponent> comps(2);
  comps[0].pi = 0.5;
  comps[0].mu = Eigen::Vector2d(0, 0);
  comps[0].cov = Eigen::MatrixXd::Identity(2, 2);
  comps[1] = comps[0];
  comps[1].mu = Eigen::Vector2d(d, 0);
  return comps;
}

}  // namespace

DataMatrix sample(const DgpSpec& spec, SeededRng& rng) {
  if (spec.n < 1) throw InvalidConfiguration("sample size must be >= 1");
  switch (spec.design) {
    case Design::Pentagon5: return sample_mixture(pentagon5_components(), spec.n, rng);
    case Design::T52D: return sample_mixture(t52d_components(), spec.n, rng);
    case Design::T510D: return sample_t510d(spec.n, rng);
    case Design::Flower2: return sample_flower2(spec.n, rng);
    case Design::Uniform: {
      DataMatrix data;
      data.values.resize(spec.n, 2);
      std::vector<int> labels(static_cast<std::size_t>(spec.n), 0);
      for (int i = 0; i < spec.n; ++i) {
        data.values(i, 0) = rng.uniform(0.0, 1.0);
        data.values(i, 1) = rng.uniform(0.0, 1.0);
      }
      data.labels = std::move(labels);
      return data;
    }
    case Design::DgpG: return sample_mixture(dgp_g_components(spec.d), spec.n, rng);
    case Design::DgpU: {
      DataMatrix data;
      data.values.resize(spec.n, 2);
      std::vector<int> labels(static_cast<std::size_t>(spec.n));
      for (int i = 0; i < spec.n; ++i) {
        const int k = static_cast<int>(rng.uniform_int(2));
        labels[static_cast<std::size_t>(i)] = k;
        const double cx = k == 0 ? 0.0 : spec.d;
        data.values(i, 0) = cx + rng.uniform(-1.0, 1.0);
        data.values(i, 1) = rng.uniform(-1.0, 1.0);
      }
      data.labels = std::move(labels);
      return data;
    }
  }
  throw InvalidConfiguration("unknown design");
}

std::pair<ClusterConfiguration, ClusterConfiguration> reference_configurations(Design design,
                                                                               double d) {
  if (design != Design::DgpG && design != Design::DgpU) {
    throw InvalidConfiguration("reference configurations exist for dgpG/dgpU only");
  }
  const bool gaussian = design == Design::DgpG;
  const double component_var = gaussian ? 1.0 : 1.0 / 3.0;

  ClusterConfiguration k1;
  k1.method_id = "reference-k1";
  k1.triplets.resize(1);
  k1.triplets[0].pi = 1.0;
  k1.triplets[0].mu = Eigen::Vector2d(d / 2.0, 0.0);
  Eigen::Matrix2d mix_cov = Eigen::Matrix2d::Zero();
  mix_cov(0, 0) = component_var + d * d / 4.0;
  mix_cov(1, 1) = component_var;
  k1.triplets[0].sigma = mix_cov;

  ClusterConfiguration k2;
  k2.method_id = "reference-k2";
  k2.triplets.resize(2);
  for (int k = 0; k < 2; ++k) {
    k2.triplets[static_cast<std::size_t>(k)].pi = 0.5;
    k2.triplets[static_cast<std::size_t>(k)].mu = Eigen::Vector2d(k == 0 ? 0.0 : d, 0.0);
    k2.triplets[static_cast<std::size_t>(k)].sigma =
        component_var * Eigen::Matrix2d::Identity();
  }
  return {std::move(k1), std::move(k2)};
}

PopulationScoreResult population_score_curve(Design design, const std::vector<double>& d_grid,
                                             int draws, int repeats, const SeededRng& rng,
                                             int workers) {
  if (draws < 1000) throw InvalidConfiguration("population curve needs draws >= 1000");
  if (repeats < 2) throw InvalidConfiguration("population curve needs repeats >= 2");
  PopulationScoreResult out;
  out.d_grid = d_grid;
  const std::size_t g = d_grid.size();
  out.h_k1.resize(g);
  out.h_k2.resize(g);
  out.t_k1.resize(g);
  out.t_k2.resize(g);
  out.se_h_k1.resize(g);
  out.se_h_k2.resize(g);
  out.se_t_k1.resize(g);
  out.se_t_k2.resize(g);

  struct Cell {
    std::vector<double> h1, h2, t1, t2;
  };
  std::vector<Cell> cells(g);
  for (Cell& c : cells) {
    c.h1.resize(static_cast<std::size_t>(repeats));
    c.h2.resize(static_cast<std::size_t>(repeats));
    c.t1.resize(static_cast<std::size_t>(repeats));
    c.t2.resize(static_cast<std::size_t>(repeats));
  }

  parallel_for(g * static_cast<std::size_t>(repeats), workers, [&](std::size_t job) {
    const std::size_t gi = job / static_cast<std::size_t>(repeats);
    const auto rep = static_cast<int>(job % static_cast<std::size_t>(repeats));
    const double d = d_grid[gi];
    auto [theta1, theta2] = reference_configurations(design, d);
    SeededRng draw_rng = rng.substream(0x637576, gi, static_cast<std::uint64_t>(rep));
    DgpSpec spec{design, draws, d};
    const DataMatrix data = sample(spec, draw_rng);
    const GaussianEvaluation eval1 = evaluate_scores(data, theta1);
    const GaussianEvaluation eval2 = evaluate_scores(data, theta2);
    Cell& c = cells[gi];
    const auto r = static_cast<std::size_t>(rep);
    c.h1[r] = hard_score(eval1);
    c.t1[r] = smooth_score(eval1);
    c.h2[r] = hard_score(eval2);
    c.t2[r] = smooth_score(eval2);
  });

  auto mean_se = [&](const std::vector<double>& v, double& mean, double& se) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / (static_cast<double>(v.size()) - 1.0)) /
         std::sqrt(static_cast<double>(v.size()));
  };
  for (std::size_t i = 0; i < g; ++i) {
    mean_se(cells[i].h1, out.h_k1[i], out.se_h_k1[i]);
    mean_se(cells[i].h2, out.h_k2[i], out.se_h_k2[i]);
    mean_se(cells[i].t1, out.t_k1[i], out.se_t_k1[i]);
    mean_se(cells[i].t2, out.t_k2[i], out.se_t_k2[i]);
  }
  return out;
}

std::optional<double> locate_crossing(const std::vector<double>& d_grid,
                                      const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i + 1 < d_grid.size(); ++i) {
    const double f0 = a[i] - b[i];
    const double f1 = a[i + 1] - b[i + 1];
    if (f0 == 0.0) return d_grid[i];
    if ((f0 > 0.0 && f1 <= 0.0) || (f0 < 0.0 && f1 >= 0.0)) {
      return d_grid[i] + (d_grid[i + 1] - d_grid[i]) * f0 / (f0 - f1);
    }
  }
  return std::nullopt;
}

void write_population_curve_csv(const PopulationScoreResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "d,h_k1,h_k2,t_k1,t_k2,se_h_k1,se_h_k2,se_t_k1,se_t_k2\n";
  for (std::size_t i = 0; i < result.d_grid.size(); ++i) {
    out << format_double(result.d_grid[i]) << ',' << format_double(result.h_k1[i]) << ','
        << format_double(result.h_k2[i]) << ',' << format_double(result.t_k1[i]) << ','
        << format_double(result.t_k2[i]) << ',' << format_double(result.se_h_k1[i]) << ','
        << format_double(result.se_h_k2[i]) << ',' << format_double(result.se_t_k1[i]) << ','
        << format_double(result.se_t_k2[i]) << '\n';
  }
}

}  // namespace qsel
