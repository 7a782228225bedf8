#include "qsel/backends.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "internal.hpp"
#include "qsel/kernels.hpp"
#include "qsel/qscore.hpp"

namespace qsel {

std::string to_string(Backend b) {
  switch (b) {
    case Backend::KMeans: return "kmeans";
    case Backend::KMedoids: return "kmedoids";
    case Backend::GaussianEM: return "gem";
  }
  return "?";
}

std::string to_string(CovarianceModel m) {
  switch (m) {
    case CovarianceModel::EII: return "EII";
    case CovarianceModel::VII: return "VII";
    case CovarianceModel::EEI: return "EEI";
    case CovarianceModel::VVI: return "VVI";
    case CovarianceModel::EEE: return "EEE";
    case CovarianceModel::VVV: return "VVV";
  }
  return "?";
}

std::string to_string(InitMethod m) {
  switch (m) {
    case InitMethod::KMeansPlusPlus: return "kpp";
    case InitMethod::PamBuild: return "pam";
    case InitMethod::RandomPartition: return "rnd";
  }
  return "?";
}

Backend backend_from_string(const std::string& s) {
  if (s == "kmeans" || s == "k-means") return Backend::KMeans;
  if (s == "kmedoids" || s == "k-medoids" || s == "pam") return Backend::KMedoids;
  if (s == "gem" || s == "gaussian-em" || s == "gmm") return Backend::GaussianEM;
  throw ConfigError("unknown backend: " + s);
}

CovarianceModel covariance_model_from_string(const std::string& s) {
  static const std::map<std::string, CovarianceModel> known = {
      {"EII", CovarianceModel::EII}, {"VII", CovarianceModel::VII},
      {"EEI", CovarianceModel::EEI}, {"VVI", CovarianceModel::VVI},
      {"EEE", CovarianceModel::EEE}, {"VVV", CovarianceModel::VVV},
  };
  static const std::set<std::string> excluded = {"VEI", "EVI", "EVE", "VEE",
                                                 "VVE", "EEV", "VEV", "EVV"};
  auto it = known.find(s);
  if (it != known.end()) return it->second;
  if (excluded.count(s)) {
    throw UnsupportedModel("covariance model " + s + " is not implemented");
  }
  throw ConfigError("unknown covariance model: " + s);
}

InitMethod init_from_string(const std::string& s) {
  if (s == "kpp" || s == "kmeans++" || s == "k-means++") return InitMethod::KMeansPlusPlus;
  if (s == "pam" || s == "pam-build") return InitMethod::PamBuild;
  if (s == "rnd" || s == "random" || s == "random-partition") return InitMethod::RandomPartition;
  throw ConfigError("unknown init method: " + s);
}

std::string MethodSpec::id() const {
  std::ostringstream out;
  out << to_string(backend);
  if (backend == Backend::GaussianEM) {
    out << '-' << to_string(model) << "-g";
    if (std::isinf(gamma)) {
      out << "inf";
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", gamma);
      out << buf;
    }
  }
  out << '-' << to_string(init);
  if (restarts != 1) out << "-r" << restarts;
  out << "-k" << k;
  return out.str();
}

int count_free_params(CovarianceModel model, int k, int p) {
  const int alpha = k * p + k - 1;
  const int beta = p * (p + 1) / 2;
  switch (model) {
    case CovarianceModel::EII: return alpha + 1;
    case CovarianceModel::VII: return alpha + p;
    case CovarianceModel::EEI: return alpha + p;
    case CovarianceModel::VVI: return alpha + k * p;
    case CovarianceModel::EEE: return alpha + beta;
    case CovarianceModel::VVV: return alpha + k * beta;
  }
  throw UnsupportedModel("unknown covariance model");
}

int count_free_params(const MethodSpec& spec, int p) {
  if (spec.backend != Backend::GaussianEM) {
    throw NotApplicable("free-parameter count requires a GaussianEM spec");
  }
  return count_free_params(spec.model, spec.k, p);
}

double covariance_floor(const DataMatrix& data) {
  const Eigen::RowVectorXd mean = data.values.colwise().mean();
  const Eigen::MatrixXd centered = data.values.rowwise() - mean;
  const double total_trace = centered.squaredNorm() / static_cast<double>(data.n());
  return 1e-8 * total_trace / static_cast<double>(data.p());
}

namespace detail {

int nearest_row(const RowMatrix& centers, const double* point, int p) {
  int best = 0;
  double best_d = kernels::sqdist(point, centers.row(0).data(), static_cast<std::size_t>(p));
  for (int k = 1; k < centers.rows(); ++k) {
    const double d = kernels::sqdist(point, centers.row(k).data(), static_cast<std::size_t>(p));
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

std::vector<int> kmeanspp_seed_rows(const RowMatrix& x, int k, SeededRng& rng) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  std::vector<int> seeds;
  seeds.reserve(static_cast<std::size_t>(k));
  seeds.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d2[static_cast<std::size_t>(i)] = kernels::sqdist(x.row(i).data(), x.row(seeds[0]).data(),
                                                      static_cast<std::size_t>(p));
  }
  while (static_cast<int>(seeds.size()) < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    int chosen;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double running = 0.0;
      chosen = n - 1;
      for (int i = 0; i < n; ++i) {
        running += d2[static_cast<std::size_t>(i)];
        if (running >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(n)));
    }
    seeds.push_back(chosen);
    for (int i = 0; i < n; ++i) {
      const double d = kernels::sqdist(x.row(i).data(), x.row(chosen).data(),
                                       static_cast<std::size_t>(p));
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], d);
    }
  }
  return seeds;
}

std::vector<int> pam_build(const Eigen::MatrixXd& dist, int k) {
  const int n = static_cast<int>(dist.rows());
  std::vector<int> medoids;
  int first = 0;
  double best_total = dist.col(0).sum();
  for (int j = 1; j < n; ++j) {
    const double total = dist.col(j).sum();
    if (total < best_total) {
      best_total = total;
      first = j;
    }
  }
  medoids.push_back(first);
  Eigen::VectorXd nearest = dist.col(first);
  while (static_cast<int>(medoids.size()) < k) {
    int best = -1;
    double best_gain = -1.0;
    for (int o = 0; o < n; ++o) {
      bool taken = false;
      for (int m : medoids) taken |= (m == o);
      if (taken) continue;
      double gain = 0.0;
      for (int i = 0; i < n; ++i) {
        const double diff = nearest(i) - dist(i, o);
        if (diff > 0.0) gain += diff;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = o;
      }
    }
    medoids.push_back(best);
    nearest = nearest.cwiseMin(dist.col(best));
  }
  return medoids;
}

Eigen::MatrixXd pairwise_distances(const RowMatrix& x) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double d =
          std::sqrt(kernels::sqdist(x.row(i).data(), x.row(j).data(), static_cast<std::size_t>(p)));
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

Partition initial_partition(const RowMatrix& x, int k, InitMethod init, SeededRng& rng) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  Partition part;
  part.k = k;
  part.labels.assign(static_cast<std::size_t>(n), 0);
  if (init == InitMethod::RandomPartition) {
    // Seed k distinct clusters, then assign the rest at random.
    std::vector<int> order = rng.shuffled_indices(n);
    for (int c = 0; c < k; ++c) part.labels[static_cast<std::size_t>(order[c])] = c;
    for (int i = k; i < n; ++i) {
      part.labels[static_cast<std::size_t>(order[i])] =
          static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(k)));
    }
    return part;
  }
  std::vector<int> seeds;
  if (init == InitMethod::PamBuild) {
    seeds = pam_build(pairwise_distances(x), k);
  } else {
    seeds = kmeanspp_seed_rows(x, k, rng);
  }
  RowMatrix centers(k, p);
  for (int c = 0; c < k; ++c) centers.row(c) = x.row(seeds[static_cast<std::size_t>(c)]);
  for (int i = 0; i < n; ++i) {
    part.labels[static_cast<std::size_t>(i)] = nearest_row(centers, x.row(i).data(), p);
  }
  // An empty cluster can only arise from duplicated seed points; claim the
  // seed point itself back.
  for (int c = 0; c < k; ++c) {
    part.labels[static_cast<std::size_t>(seeds[static_cast<std::size_t>(c)])] = c;
  }
  return part;
}

}  // namespace detail

ClusterConfiguration triplets_from_partition(const DataMatrix& data, const Partition& partition,
                                             double gamma) {
  const int n = data.n();
  const int p = data.p();
  const int K = partition.k;
  if (partition.n() != n) throw LengthMismatch("partition length does not match data");

  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int label : partition.labels) counts[static_cast<std::size_t>(label)]++;
  for (int k = 0; k < K; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      throw EmptyCluster("cluster " + std::to_string(k) + " has no members");
    }
  }

  ClusterConfiguration theta;
  theta.triplets.resize(static_cast<std::size_t>(K));
  std::vector<Eigen::MatrixXd> scatters(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const int nk = counts[static_cast<std::size_t>(k)];
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < n; ++i) {
      if (partition.labels[static_cast<std::size_t>(i)] == k) mu += data.values.row(i).transpose();
    }
    mu /= static_cast<double>(nk);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < n; ++i) {
      if (partition.labels[static_cast<std::size_t>(i)] == k) {
        const Eigen::VectorXd c = data.values.row(i).transpose() - mu;
        s.noalias() += c * c.transpose();
      }
    }
    s /= static_cast<double>(nk);
    theta.triplets[static_cast<std::size_t>(k)].pi =
        static_cast<double>(nk) / static_cast<double>(n);
    theta.triplets[static_cast<std::size_t>(k)].mu = std::move(mu);
    scatters[static_cast<std::size_t>(k)] = std::move(s);
  }

  // Mixing proportions are exact rationals; absorb the last rounding ulp
  // into the largest cluster so the sum is exactly 1.
  double pi_sum = 0.0;
  int largest = 0;
  for (int k = 0; k < K; ++k) {
    pi_sum += theta.triplets[static_cast<std::size_t>(k)].pi;
    if (counts[static_cast<std::size_t>(k)] > counts[static_cast<std::size_t>(largest)]) {
      largest = k;
    }
  }
  theta.triplets[static_cast<std::size_t>(largest)].pi += 1.0 - pi_sum;

  std::vector<double> weights(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    weights[static_cast<std::size_t>(k)] = static_cast<double>(counts[static_cast<std::size_t>(k)]);
  }
  detail::regularize_scatters(scatters, weights, covariance_floor(data), gamma);
  for (int k = 0; k < K; ++k) {
    theta.triplets[static_cast<std::size_t>(k)].sigma = std::move(scatters[static_cast<std::size_t>(k)]);
  }
  return theta;
}

FitResult fit(const DataMatrix& data, const MethodSpec& spec, SeededRng& rng) {
  if (spec.k < 1) throw InvalidConfiguration("k must be >= 1");
  if (spec.k > data.n()) {
    throw NotEnoughPoints("k=" + std::to_string(spec.k) + " exceeds n=" +
                          std::to_string(data.n()));
  }
  switch (spec.backend) {
    case Backend::KMeans: return detail::fit_kmeans(data, spec, rng);
    case Backend::KMedoids: return detail::fit_kmedoids(data, spec, rng);
    case Backend::GaussianEM: return detail::fit_gaussian_em(data, spec, rng, nullptr);
  }
  throw InvalidConfiguration("unknown backend");
}

Partition assign_to_fit(const DataMatrix& data, const FitResult& fit) {
  if (fit.backend == Backend::GaussianEM) {
    return quadratic_partition(data, fit.theta);
  }
  const detail::RowMatrix x = data.values;
  const detail::RowMatrix centers = fit.centers;
  Partition part;
  part.k = static_cast<int>(centers.rows());
  part.labels.resize(static_cast<std::size_t>(data.n()));
  for (int i = 0; i < data.n(); ++i) {
    part.labels[static_cast<std::size_t>(i)] =
        detail::nearest_row(centers, x.row(i).data(), data.p());
  }
  return part;
}

}  // namespace qsel
