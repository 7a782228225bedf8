#include "qsel/rng.hpp"

#include <cmath>
#include <numbers>

namespace qsel {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(tag) ^ a) ^ b);
}

std::uint64_t stream_key(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // Expand (seed, stream) into engine state through splitmix64; the
  // mt19937_64 sequence itself is pinned by the standard.
  std::uint64_t s = mix64(seed ^ mix64(stream_id));
  engine_.seed(s);
}

SeededRng SeededRng::substream(std::uint64_t tag, std::uint64_t a, std::uint64_t b) const {
  return SeededRng(seed_, derive_stream(stream_id_ ^ mix64(tag), a, b));
}

std::uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::uniform01() {
  // 53-bit mantissa, shifted into (0, 1].
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53);
}

std::uint32_t SeededRng::uniform_int(std::uint32_t n) {
  // Rejection against the largest multiple of n below 2^32.
  const std::uint64_t limit = (0x100000000ULL / n) * n;
  for (;;) {
    std::uint64_t draw = next_u64() >> 32;
    if (draw < limit) return static_cast<std::uint32_t>(draw % n);
  }
}

double SeededRng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return r * std::cos(t);
}

double SeededRng::gamma(double shape) {
  if (shape < 1.0) {
    // Boost to shape+1 and scale back (Marsaglia-Tsang augmentation).
    const double u = uniform01();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<int> SeededRng::shuffled_indices(int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(uniform_int(static_cast<std::uint32_t>(i + 1)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

Eigen::VectorXd SeededRng::normal_vector(const Eigen::VectorXd& mu,
                                         const Eigen::MatrixXd& chol_lower) {
  Eigen::VectorXd z(mu.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal();
  return mu + chol_lower * z;
}

}  // namespace qsel
