#include "qsel/metrics.hpp"

#include <cmath>

namespace qsel {

ContingencyTable contingency_table(const Partition& a, const Partition& b) {
  if (a.n() != b.n()) throw LengthMismatch("partitions have different lengths");
  ContingencyTable t;
  t.n = a.n();
  const int ka = a.k, kb = b.k;
  t.counts.assign(static_cast<std::size_t>(ka),
                  std::vector<long long>(static_cast<std::size_t>(kb), 0));
  t.row_sums.assign(static_cast<std::size_t>(ka), 0);
  t.col_sums.assign(static_cast<std::size_t>(kb), 0);
  for (int i = 0; i < a.n(); ++i) {
    const int u = a.labels[static_cast<std::size_t>(i)];
    const int v = b.labels[static_cast<std::size_t>(i)];
    t.counts[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]++;
    t.row_sums[static_cast<std::size_t>(u)]++;
    t.col_sums[static_cast<std::size_t>(v)]++;
  }
  return t;
}

namespace {

double choose2(long long m) { return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1); }

}  // namespace

double adjusted_rand_index(const Partition& a, const Partition& b) {
  const ContingencyTable t = contingency_table(a, b);
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& row : t.counts) {
    for (long long c : row) sum_cells += choose2(c);
  }
  for (long long r : t.row_sums) sum_rows += choose2(r);
  for (long long c : t.col_sums) sum_cols += choose2(c);
  const double pairs = choose2(t.n);
  const double expected = pairs > 0.0 ? sum_rows * sum_cols / pairs : 0.0;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  const double denom = maximum - expected;
  if (denom == 0.0) return 1.0;  // both partitions trivial
  return (sum_cells - expected) / denom;
}

double negative_vic(const Partition& a, const Partition& b) {
  const ContingencyTable t = contingency_table(a, b);
  const double n = static_cast<double>(t.n);
  double ha = 0.0, hb = 0.0, mutual = 0.0;
  for (long long r : t.row_sums) {
    if (r > 0) {
      const double p = r / n;
      ha -= p * std::log(p);
    }
  }
  for (long long c : t.col_sums) {
    if (c > 0) {
      const double p = c / n;
      hb -= p * std::log(p);
    }
  }
  for (std::size_t u = 0; u < t.counts.size(); ++u) {
    for (std::size_t v = 0; v < t.counts[u].size(); ++v) {
      const long long c = t.counts[u][v];
      if (c > 0) {
        const double p = c / n;
        mutual += p * std::log(p * n * n / (static_cast<double>(t.row_sums[u]) *
                                            static_cast<double>(t.col_sums[v])));
      }
    }
  }
  const double vi = ha + hb - 2.0 * mutual;
  return vi <= 0.0 ? 0.0 : -vi;  // clamp the -0 and rounding dust at equality
}

}  // namespace qsel
