#pragma once

#include <cstddef>
#include <cstdint>

namespace qsel::kernels {

// Flat-array kernels behind the score and distance inner loops. Every
// kernel has a scalar reference implementation and, on x86-64, an AVX2+FMA
// variant selected once at startup. A single kernel call always reduces in
// a fixed order, so results are reproducible for a given backend.
struct Ops {
  double (*sum)(const double* x, std::size_t n);
  double (*sqdist)(const double* x, const double* y, std::size_t n);
  // best[i] = max(best[i], col[i])
  void (*rowmax_update)(double* best, const double* col, std::size_t n);
  // strict improvement keeps the lowest cluster index on ties
  void (*argmax_update)(double* best, std::int32_t* arg, const double* col,
                        std::int32_t k, std::size_t n);
  // acc[i] += exp(x[i] - m[i])
  void (*exp_diff_accum)(double* acc, const double* x, const double* m, std::size_t n);
  // acc[i] += exp(x[i] - m[i]) * x[i]
  void (*exp_diff_mul_accum)(double* acc, const double* x, const double* m, std::size_t n);
  // out[i] = exp(x[i] - m[i])
  void (*exp_diff_store)(double* out, const double* x, const double* m, std::size_t n);
  // x[i] /= d[i]
  void (*divide_inplace)(double* x, const double* d, std::size_t n);
  // sum of num[i] / den[i]
  double (*ratio_sum)(const double* num, const double* den, std::size_t n);
};

const Ops& scalar_ops();

/// Null when the build or the host CPU lacks AVX2+FMA.
const Ops* avx2_ops();

/// The table picked at startup: AVX2 when available, otherwise scalar.
/// QSEL_KERNELS=scalar|avx2 in the environment forces a backend.
const Ops& active();

/// Name of the active backend ("scalar" or "avx2").
const char* active_name();

inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline double sqdist(const double* x, const double* y, std::size_t n) {
  return active().sqdist(x, y, n);
}
inline void rowmax_update(double* best, const double* col, std::size_t n) {
  active().rowmax_update(best, col, n);
}
inline void argmax_update(double* best, std::int32_t* arg, const double* col,
                          std::int32_t k, std::size_t n) {
  active().argmax_update(best, arg, col, k, n);
}
inline void exp_diff_accum(double* acc, const double* x, const double* m, std::size_t n) {
  active().exp_diff_accum(acc, x, m, n);
}
inline void exp_diff_mul_accum(double* acc, const double* x, const double* m, std::size_t n) {
  active().exp_diff_mul_accum(acc, x, m, n);
}
inline void exp_diff_store(double* out, const double* x, const double* m, std::size_t n) {
  active().exp_diff_store(out, x, m, n);
}
inline void divide_inplace(double* x, const double* d, std::size_t n) {
  active().divide_inplace(x, d, n);
}
inline double ratio_sum(const double* num, const double* den, std::size_t n) {
  return active().ratio_sum(num, den, n);
}

}  // namespace qsel::kernels
