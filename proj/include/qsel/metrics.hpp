#pragma once

#include <vector>

#include "qsel/types.hpp"

namespace qsel {

/// Joint label counts of two partitions over the same n points.
struct ContingencyTable {
  std::vector<std::vector<long long>> counts;  // K1 x K2
  std::vector<long long> row_sums;
  std::vector<long long> col_sums;
  long long n = 0;
};

ContingencyTable contingency_table(const Partition& a, const Partition& b);

/// Hubert-Arabie adjusted Rand index; 1 iff the partitions coincide up to
/// relabeling. The doubly-trivial case (denominator 0) returns 1.
double adjusted_rand_index(const Partition& a, const Partition& b);

/// Negative variation of information (natural log); 0 iff the partitions
/// coincide up to relabeling, otherwise < 0.
double negative_vic(const Partition& a, const Partition& b);

}  // namespace qsel
