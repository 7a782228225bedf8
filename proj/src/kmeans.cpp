#include <cmath>
#include <limits>

#include "internal.hpp"
#include "qsel/kernels.hpp"

namespace qsel::detail {

namespace {

struct LloydRun {
  std::vector<int> assign;
  RowMatrix centers;
  double sse = 0.0;
  int iterations = 0;
  bool converged = false;
};

// One Lloyd descent from the given initial partition. Returns false when a
// second empty-cluster repair would be needed.
bool lloyd(const RowMatrix& x, int k, const Partition& init, int max_iter, LloydRun& run,
           std::vector<double>* sse_trace) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  run.assign = init.labels;
  run.centers.resize(k, p);
  std::vector<int> counts(static_cast<std::size_t>(k));
  int repairs = 0;

  auto current_sse = [&]() {
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      sse += kernels::sqdist(x.row(i).data(),
                             run.centers.row(run.assign[static_cast<std::size_t>(i)]).data(),
                             static_cast<std::size_t>(p));
    }
    return sse;
  };

  auto update_centers = [&]() -> bool {
    run.centers.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      run.centers.row(run.assign[static_cast<std::size_t>(i)]) += x.row(i);
      counts[static_cast<std::size_t>(run.assign[static_cast<std::size_t>(i)])]++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        if (++repairs > 1) return false;
        // Seed the empty cluster with the point farthest from its center.
        int worst = -1;
        double worst_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const int a = run.assign[static_cast<std::size_t>(i)];
          if (counts[static_cast<std::size_t>(a)] <= 1) continue;
          const double d = kernels::sqdist(
              x.row(i).data(),
              (run.centers.row(a) / counts[static_cast<std::size_t>(a)]).eval().data(),
              static_cast<std::size_t>(p));
          if (d > worst_d) {
            worst_d = d;
            worst = i;
          }
        }
        if (worst < 0) return false;
        const int old = run.assign[static_cast<std::size_t>(worst)];
        run.centers.row(old) -= x.row(worst);
        counts[static_cast<std::size_t>(old)]--;
        run.assign[static_cast<std::size_t>(worst)] = c;
        run.centers.row(c) = x.row(worst);
        counts[static_cast<std::size_t>(c)] = 1;
      }
    }
    for (int c = 0; c < k; ++c) run.centers.row(c) /= counts[static_cast<std::size_t>(c)];
    return true;
  };

  if (!update_centers()) return false;
  for (run.iterations = 1; run.iterations <= max_iter; ++run.iterations) {
    if (sse_trace) sse_trace->push_back(current_sse());
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int nearest = nearest_row(run.centers, x.row(i).data(), p);
      if (nearest != run.assign[static_cast<std::size_t>(i)]) {
        run.assign[static_cast<std::size_t>(i)] = nearest;
        changed = true;
      }
    }
    if (!changed) {
      run.converged = true;
      break;
    }
    if (!update_centers()) return false;
  }
  run.sse = current_sse();
  if (sse_trace) sse_trace->push_back(run.sse);
  return true;
}

}  // namespace

FitResult fit_kmeans(const DataMatrix& data, const MethodSpec& spec, SeededRng& rng,
                     std::vector<double>* sse_trace) {
  const RowMatrix x = data.values;
  LloydRun best;
  bool have_best = false;
  for (int r = 0; r < spec.restarts; ++r) {
    SeededRng restart_rng = rng.substream(0x6b6d, static_cast<std::uint64_t>(r));
    const Partition init = initial_partition(x, spec.k, spec.init, restart_rng);
    LloydRun run;
    if (!lloyd(x, spec.k, init, spec.max_iter, run, r == 0 ? sse_trace : nullptr)) continue;
    if (!have_best || run.sse < best.sse) {
      best = std::move(run);
      have_best = true;
    }
  }
  if (!have_best) throw DegenerateFit("every k-means restart collapsed");

  FitResult out;
  out.backend = Backend::KMeans;
  out.partition.labels = best.assign;
  out.partition.k = spec.k;
  out.theta = triplets_from_partition(data, out.partition, kGammaUnbounded);
  out.theta.method_id = spec.id();
  out.objective = -best.sse;
  out.n_params = spec.k * data.p();
  out.converged = best.converged;
  out.iterations = best.iterations;
  out.centers = best.centers;
  return out;
}

}  // namespace qsel::detail
