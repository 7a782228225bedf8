#pragma once

#include <vector>

#include "qsel/types.hpp"

namespace qsel {

struct StandardizeResult {
  DataMatrix data;
  std::vector<int> zero_variance_columns;  // centered only, flagged
};

/// Centers every column to mean 0 and scales to unit sample standard
/// deviation; zero-variance columns are centered only and flagged.
/// Requires n >= 2.
StandardizeResult standardize(const DataMatrix& data);

}  // namespace qsel
