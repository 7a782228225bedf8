#include <algorithm>
#include <cmath>
#include <vector>

#include "qsel/backends.hpp"
#include "qsel/error.hpp"

namespace qsel {

namespace detail {

// Constrained deviation objective of the truncation family:
//   f(m) = sum_j w_j (log lambda_j(m) + e_j / lambda_j(m)),
//   lambda_j(m) = clip(e_j, m, gamma m).
double truncation_objective(const std::vector<double>& e, const std::vector<double>& w,
                            double gamma, double m) {
  double f = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    const double lam = std::clamp(e[j], m, gamma * m);
    f += w[j] * (std::log(lam) + e[j] / lam);
  }
  return f;
}

// Exact minimizer over m: the objective is piecewise smooth between the
// breakpoints {e_j, e_j / gamma}; each piece has a closed-form stationary
// point, so scanning pieces finds the global optimum.
double optimal_truncation_threshold(const std::vector<double>& e, const std::vector<double>& w,
                                    double gamma) {
  std::vector<double> bps;
  bps.reserve(2 * e.size());
  for (double v : e) {
    if (v > 0.0) {
      bps.push_back(v);
      bps.push_back(v / gamma);
    }
  }
  if (bps.empty()) throw DegenerateFit("all eigenvalues are zero under the eigen-ratio bound");
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  double best_m = bps.front();
  double best_f = truncation_objective(e, w, gamma, best_m);

  auto consider = [&](double lo, double hi, double probe) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] < probe) {
        num += w[j] * e[j];
        den += w[j];
      } else if (e[j] > gamma * probe) {
        num += w[j] * e[j] / gamma;
        den += w[j];
      }
    }
    double m = den > 0.0 ? num / den : probe;
    m = std::clamp(m, lo, hi);
    if (!(m > 0.0)) return;
    const double f = truncation_objective(e, w, gamma, m);
    if (f < best_f) {
      best_f = f;
      best_m = m;
    }
  };

  consider(bps.front() * 0.5, bps.front(), bps.front() * 0.75);
  for (std::size_t t = 0; t + 1 < bps.size(); ++t) {
    const double lo = bps[t], hi = bps[t + 1];
    consider(lo, hi, 0.5 * (lo + hi));
  }
  consider(bps.back(), bps.back() * 2.0, bps.back() * 1.5);
  for (double bp : bps) {
    const double f = truncation_objective(e, w, gamma, bp);
    if (f < best_f) {
      best_f = f;
      best_m = bp;
    }
  }
  return best_m;
}

std::vector<double> erc_truncate(const std::vector<double>& eigenvalues,
                                 const std::vector<double>& weights, double gamma) {
  const double m = optimal_truncation_threshold(eigenvalues, weights, gamma);
  std::vector<double> out(eigenvalues.size());
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    out[j] = std::clamp(eigenvalues[j], m, gamma * m);
  }
  return out;
}

int regularize_scatters(std::vector<Eigen::MatrixXd>& scatters, const std::vector<double>& weights,
                        double floor, double gamma) {
  const std::size_t K = scatters.size();
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> solvers;
  solvers.reserve(K);
  std::vector<double> eigenvalues;
  std::vector<double> per_value_weights;
  int floored = 0;
  for (std::size_t k = 0; k < K; ++k) {
    solvers.emplace_back(scatters[k]);
    bool hit = false;
    for (Eigen::Index i = 0; i < solvers.back().eigenvalues().size(); ++i) {
      double e = solvers.back().eigenvalues()(i);
      if (e < floor) {
        e = floor;
        hit = true;
      }
      eigenvalues.push_back(e);
      per_value_weights.push_back(weights[k]);
    }
    if (hit) ++floored;
  }

  std::vector<double> lam = eigenvalues;
  if (!std::isinf(gamma)) {
    const double lo = *std::min_element(lam.begin(), lam.end());
    const double hi = *std::max_element(lam.begin(), lam.end());
    if (!(lo > 0.0) || hi > gamma * lo * (1.0 + 1e-9)) {
      lam = erc_truncate(eigenvalues, per_value_weights, gamma);
    }
  }
  std::size_t pos = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const Eigen::Index p = scatters[k].rows();
    Eigen::VectorXd d(p);
    for (Eigen::Index i = 0; i < p; ++i) d(i) = lam[pos++];
    scatters[k] = solvers[k].eigenvectors() * d.asDiagonal() * solvers[k].eigenvectors().transpose();
  }
  return floored;
}

}  // namespace detail

std::vector<Eigen::MatrixXd> enforce_erc(const std::vector<Eigen::MatrixXd>& sigmas,
                                         double gamma) {
  if (gamma < 1.0) throw InvalidConfiguration("eigen-ratio bound must satisfy gamma >= 1");
  if (sigmas.empty() || std::isinf(gamma)) return sigmas;

  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> solvers;
  solvers.reserve(sigmas.size());
  std::vector<double> eigenvalues;
  for (const Eigen::MatrixXd& s : sigmas) {
    solvers.emplace_back(s);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      eigenvalues.push_back(solvers.back().eigenvalues()(i));
    }
  }
  const double lo = *std::min_element(eigenvalues.begin(), eigenvalues.end());
  const double hi = *std::max_element(eigenvalues.begin(), eigenvalues.end());
  if (lo > 0.0 && hi <= gamma * lo * (1.0 + 1e-9)) {
    return sigmas;  // constraint inactive: bit-identical passthrough
  }

  const std::vector<double> weights(eigenvalues.size(), 1.0);
  const std::vector<double> truncated = detail::erc_truncate(eigenvalues, weights, gamma);

  std::vector<Eigen::MatrixXd> out;
  out.reserve(sigmas.size());
  std::size_t pos = 0;
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    const auto& es = solvers[k];
    Eigen::VectorXd lam(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = truncated[pos++];
    out.push_back(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
  }
  return out;
}

}  // namespace qsel
