#include <cmath>

#include "qsel/kernels.hpp"

namespace qsel::kernels {

namespace {

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sqdist_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

void rowmax_update_scalar(double* best, const double* col, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (col[i] > best[i]) best[i] = col[i];
  }
}

void argmax_update_scalar(double* best, std::int32_t* arg, const double* col, std::int32_t k,
                          std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (col[i] > best[i]) {
      best[i] = col[i];
      arg[i] = k;
    }
  }
}

void exp_diff_accum_scalar(double* acc, const double* x, const double* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += std::exp(x[i] - m[i]);
}

void exp_diff_mul_accum_scalar(double* acc, const double* x, const double* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += std::exp(x[i] - m[i]) * x[i];
}

void exp_diff_store_scalar(double* out, const double* x, const double* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i] - m[i]);
}

void divide_inplace_scalar(double* x, const double* d, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
}

double ratio_sum_scalar(const double* num, const double* den, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += num[i] / den[i];
  return acc;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      sum_scalar,
      sqdist_scalar,
      rowmax_update_scalar,
      argmax_update_scalar,
      exp_diff_accum_scalar,
      exp_diff_mul_accum_scalar,
      exp_diff_store_scalar,
      divide_inplace_scalar,
      ratio_sum_scalar,
  };
  return ops;
}

}  // namespace qsel::kernels
