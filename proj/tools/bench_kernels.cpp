// Micro-benchmark of the kernel backends: prints ns/element for the scalar
// reference and (when available) the AVX2 variant of each hot kernel.

#include <chrono>
#include <cstdio>
#include <vector>

#include "qsel/kernels.hpp"
#include "qsel/rng.hpp"

using namespace qsel;
using Clock = std::chrono::steady_clock;

namespace {

volatile double g_sink = 0.0;

template <typename F>
double time_ns_per_element(std::size_t n, int reps, F&& body) {
  body();  // warm up
  const auto start = Clock::now();
  for (int r = 0; r < reps; ++r) body();
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return static_cast<double>(ns.count()) / reps / static_cast<double>(n);
}

void run(const char* name, const kernels::Ops& ops, std::size_t n, int reps) {
  SeededRng rng(1, 0);
  std::vector<double> x(n), y(n), m(n), acc(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform(-8.0, 0.0);
    y[i] = rng.uniform(-8.0, 0.0);
    m[i] = rng.uniform(-1.0, 1.0);
  }
  std::vector<std::int32_t> arg(n, 0);

  std::printf("%-8s n=%-8zu", name, n);
  std::printf(" sum %5.2f", time_ns_per_element(n, reps, [&] { g_sink = ops.sum(x.data(), n); }));
  std::printf(" sqdist %5.2f",
              time_ns_per_element(n, reps, [&] { g_sink = ops.sqdist(x.data(), y.data(), n); }));
  std::printf(" rowmax %5.2f", time_ns_per_element(n, reps, [&] {
                std::vector<double> best = y;
                ops.rowmax_update(best.data(), x.data(), n);
                g_sink = best[0];
              }));
  std::printf(" expacc %5.2f", time_ns_per_element(n, reps, [&] {
                std::fill(acc.begin(), acc.end(), 0.0);
                ops.exp_diff_accum(acc.data(), x.data(), m.data(), n);
                g_sink = acc[0];
              }));
  std::printf(" ratio %5.2f\n", time_ns_per_element(n, reps, [&] {
                g_sink = ops.ratio_sum(x.data(), y.data(), n);
              }));
}

}  // namespace

int main() {
  const std::size_t sizes[] = {1000, 100000};
  std::printf("active backend: %s   (ns per element)\n", kernels::active_name());
  for (std::size_t n : sizes) {
    const int reps = n >= 100000 ? 200 : 5000;
    run("scalar", kernels::scalar_ops(), n, reps);
    if (const kernels::Ops* avx2 = kernels::avx2_ops()) {
      run("avx2", *avx2, n, reps);
    }
  }
  return 0;
}
