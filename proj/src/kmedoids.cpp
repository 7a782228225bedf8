#include <algorithm>
#include <limits>

#include "internal.hpp"

namespace qsel::detail {

namespace {

struct Neighbors {
  std::vector<int> nearest;
  std::vector<double> d_nearest;
  std::vector<double> d_second;
};

Neighbors neighbors(const Eigen::MatrixXd& dist, const std::vector<int>& medoids) {
  const int n = static_cast<int>(dist.rows());
  Neighbors nb;
  nb.nearest.assign(static_cast<std::size_t>(n), medoids[0]);
  nb.d_nearest.assign(static_cast<std::size_t>(n), 0.0);
  nb.d_second.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    int m1 = medoids[0];
    for (int m : medoids) {
      const double d = dist(i, m);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        m1 = m;
      } else if (d < d2) {
        d2 = d;
      }
    }
    nb.nearest[static_cast<std::size_t>(i)] = m1;
    nb.d_nearest[static_cast<std::size_t>(i)] = d1;
    nb.d_second[static_cast<std::size_t>(i)] = d2;
  }
  return nb;
}

}  // namespace

FitResult fit_kmedoids(const DataMatrix& data, const MethodSpec& spec, SeededRng& rng) {
  const RowMatrix x = data.values;
  const int n = data.n();
  const int k = spec.k;
  const Eigen::MatrixXd dist = pairwise_distances(x);

  std::vector<int> medoids;
  if (spec.init == InitMethod::RandomPartition) {
    const std::vector<int> order = rng.shuffled_indices(n);
    medoids.assign(order.begin(), order.begin() + k);
  } else if (spec.init == InitMethod::KMeansPlusPlus) {
    medoids = kmeanspp_seed_rows(x, k, rng);
  } else {
    medoids = pam_build(dist, k);
  }

  // PAM SWAP phase: apply the best improving (medoid, candidate) exchange
  // until none remains.
  int iterations = 0;
  bool converged = false;
  const int max_iter = std::max(spec.max_iter, 1);
  std::vector<char> is_medoid(static_cast<std::size_t>(n), 0);
  for (; iterations < max_iter; ++iterations) {
    std::fill(is_medoid.begin(), is_medoid.end(), 0);
    for (int m : medoids) is_medoid[static_cast<std::size_t>(m)] = 1;
    const Neighbors nb = neighbors(dist, medoids);

    double best_delta = -1e-12;
    int best_m = -1, best_o = -1;
    for (std::size_t mi = 0; mi < medoids.size(); ++mi) {
      const int m = medoids[mi];
      for (int o = 0; o < n; ++o) {
        if (is_medoid[static_cast<std::size_t>(o)]) continue;
        double delta = 0.0;
        for (int j = 0; j < n; ++j) {
          const double djo = dist(j, o);
          if (nb.nearest[static_cast<std::size_t>(j)] == m) {
            delta += std::min(djo, nb.d_second[static_cast<std::size_t>(j)]) -
                     nb.d_nearest[static_cast<std::size_t>(j)];
          } else if (djo < nb.d_nearest[static_cast<std::size_t>(j)]) {
            delta += djo - nb.d_nearest[static_cast<std::size_t>(j)];
          }
        }
        if (delta < best_delta) {
          best_delta = delta;
          best_m = static_cast<int>(mi);
          best_o = o;
        }
      }
    }
    if (best_m < 0) {
      converged = true;
      break;
    }
    medoids[static_cast<std::size_t>(best_m)] = best_o;
  }

  std::sort(medoids.begin(), medoids.end());
  FitResult out;
  out.backend = Backend::KMedoids;
  out.partition.k = k;
  out.partition.labels.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = dist(i, medoids[0]);
    for (int c = 1; c < k; ++c) {
      const double d = dist(i, medoids[static_cast<std::size_t>(c)]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out.partition.labels[static_cast<std::size_t>(i)] = best;
    total += best_d;
  }
  out.theta = triplets_from_partition(data, out.partition, kGammaUnbounded);
  out.theta.method_id = spec.id();
  out.objective = -total;
  out.n_params = k * data.p();
  out.converged = converged;
  out.iterations = iterations;
  out.centers.resize(k, data.p());
  for (int c = 0; c < k; ++c) out.centers.row(c) = x.row(medoids[static_cast<std::size_t>(c)]);
  return out;
}

}  // namespace qsel::detail
