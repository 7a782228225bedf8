#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qsel {

/// splitmix64 finalizer; the basis of all stream derivation.
std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive combination of stream coordinates into one stream id.
std::uint64_t derive_stream(std::uint64_t tag, std::uint64_t a, std::uint64_t b);

/// Stable 64-bit key of a string (FNV-1a finalized with mix64); used to
/// derive per-method RNG streams.
std::uint64_t stream_key(const std::string& s);

/// Deterministic random source. Identical (seed, stream_id) pairs produce
/// identical draw sequences on every run and under any degree of
/// parallelism; every distribution below is implemented in-library so the
/// sequence does not depend on the standard library vendor.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// New generator for a child task, derived without consuming state.
  SeededRng substream(std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0) const;

  std::uint64_t next_u64();

  /// Uniform on (0, 1] with 53-bit resolution (never exactly 0).
  double uniform01();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Unbiased integer in [0, n), n >= 1.
  std::uint32_t uniform_int(std::uint32_t n);

  /// Standard normal via Box-Muller; draws are cached in pairs.
  double normal();

  /// Marsaglia-Tsang gamma with unit scale, shape > 0.
  double gamma(double shape);

  double chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

  /// In-place Fisher-Yates shuffle of indices 0..n-1.
  std::vector<int> shuffled_indices(int n);

  /// Draw from N(mu, sigma) given the lower Cholesky factor of sigma.
  Eigen::VectorXd normal_vector(const Eigen::VectorXd& mu, const Eigen::MatrixXd& chol_lower);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace qsel
