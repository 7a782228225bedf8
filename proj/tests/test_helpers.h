#pragma once

// Shared generators and naive oracles for the test suites. Oracles here
// deliberately avoid the library's evaluation path (no Cholesky, no
// log-sum-exp) so agreement is meaningful.

#include <cmath>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qsel/rng.hpp"
#include "qsel/types.hpp"

namespace testhelpers {

inline Eigen::MatrixXd random_spd(qsel::SeededRng& rng, int p, double jitter = 0.3) {
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  }
  Eigen::MatrixXd s = a * a.transpose() / p;
  s += jitter * Eigen::MatrixXd::Identity(p, p);
  return s;
}

inline qsel::DataMatrix random_data(qsel::SeededRng& rng, int n, int p, double scale = 2.0) {
  qsel::DataMatrix data;
  data.values.resize(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) data.values(i, j) = scale * rng.normal();
  }
  return data;
}

inline qsel::ClusterConfiguration random_config(qsel::SeededRng& rng, int k, int p) {
  qsel::ClusterConfiguration theta;
  theta.triplets.resize(static_cast<std::size_t>(k));
  std::vector<double> raw(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& w : raw) {
    w = 0.2 + rng.uniform01();
    total += w;
  }
  for (int c = 0; c < k; ++c) {
    auto& t = theta.triplets[static_cast<std::size_t>(c)];
    t.pi = raw[static_cast<std::size_t>(c)] / total;
    t.mu.resize(p);
    for (int j = 0; j < p; ++j) t.mu(j) = 3.0 * rng.normal();
    t.sigma = random_spd(rng, p);
  }
  return theta;
}

// log(pi_k phi(x; mu_k, Sigma_k)) straight from the density formula, with
// an explicit inverse and determinant.
inline double naive_log_component(const Eigen::VectorXd& x, const qsel::ClusterTriplet& t) {
  const int p = static_cast<int>(x.size());
  const double det = t.sigma.determinant();
  const Eigen::MatrixXd inv = t.sigma.inverse();
  const Eigen::VectorXd c = x - t.mu;
  const double quad = c.dot(inv * c);
  return std::log(t.pi) - 0.5 * p * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) -
         0.5 * quad;
}

inline double naive_mixture_loglik(const qsel::DataMatrix& data,
                                   const qsel::ClusterConfiguration& theta) {
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    double density = 0.0;
    for (const qsel::ClusterTriplet& t : theta.triplets) {
      density += std::exp(naive_log_component(data.values.row(i).transpose(), t));
    }
    total += std::log(density);
  }
  return total;
}

// Pair-counting ARI over all unordered pairs, straight from the counts.
inline double ari_pair_counting_oracle(const qsel::Partition& a, const qsel::Partition& b) {
  const int n = a.n();
  double n11 = 0, n00 = 0, n10 = 0, n01 = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool ca = a.labels[static_cast<std::size_t>(i)] == a.labels[static_cast<std::size_t>(j)];
      const bool cb = b.labels[static_cast<std::size_t>(i)] == b.labels[static_cast<std::size_t>(j)];
      if (ca && cb) n11++;
      else if (!ca && !cb) n00++;
      else if (ca) n10++;
      else n01++;
    }
  }
  const double total = n11 + n00 + n10 + n01;
  const double expected = (n11 + n10) * (n11 + n01) / total;
  const double maximum = 0.5 * ((n11 + n10) + (n11 + n01));
  if (maximum == expected) return 1.0;
  return (n11 - expected) / (maximum - expected);
}

// Variation of information from joint histograms: VI = 2 H(a,b) - H(a) - H(b).
inline double vi_joint_entropy_oracle(const qsel::Partition& a, const qsel::Partition& b) {
  const double n = a.n();
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pj;
  for (int i = 0; i < a.n(); ++i) {
    pa[a.labels[static_cast<std::size_t>(i)]] += 1.0 / n;
    pb[b.labels[static_cast<std::size_t>(i)]] += 1.0 / n;
    pj[{a.labels[static_cast<std::size_t>(i)], b.labels[static_cast<std::size_t>(i)]}] += 1.0 / n;
  }
  double ha = 0, hb = 0, hj = 0;
  for (auto& [k, v] : pa) ha -= v * std::log(v);
  for (auto& [k, v] : pb) hb -= v * std::log(v);
  for (auto& [k, v] : pj) hj -= v * std::log(v);
  const double vi = 2.0 * hj - ha - hb;
  return vi < 0.0 ? 0.0 : vi;
}

}  // namespace testhelpers
