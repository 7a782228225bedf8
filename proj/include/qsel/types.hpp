#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qsel/error.hpp"

namespace qsel {

/// n x p sample of real-valued feature vectors, one observation per row,
/// with optional ground-truth class ids and feature names.
struct DataMatrix {
  Eigen::MatrixXd values;                         // n x p, finite entries
  std::optional<std::vector<int>> labels;         // ground-truth ids, size n
  std::vector<std::string> label_names;           // id -> original label text
  std::vector<std::string> feature_names;         // size p, may be empty

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }

  /// Throws EmptyData / InvalidConfiguration when an invariant is violated.
  void validate() const;

  /// Copy of the selected rows (labels dropped; row order as given).
  DataMatrix take_rows(const std::vector<int>& rows) const;
};

/// Size, center and scatter of one cluster.
struct ClusterTriplet {
  double pi = 1.0;          // expected fraction of points, in (0, 1]
  Eigen::VectorXd mu;       // center, length p
  Eigen::MatrixXd sigma;    // p x p symmetric positive definite scatter
};

/// A candidate clustering solution expressed as cluster triplets.
struct ClusterConfiguration {
  std::vector<ClusterTriplet> triplets;
  std::string method_id;

  int k() const { return static_cast<int>(triplets.size()); }
  int dim() const { return triplets.empty() ? 0 : static_cast<int>(triplets.front().mu.size()); }
};

/// Hard assignment of n points to clusters 0..k-1.
struct Partition {
  std::vector<int> labels;
  int k = 0;

  int n() const { return static_cast<int>(labels.size()); }
};

/// Checks every triplet invariant plus the mixing-sum invariant for
/// dimension p; throws InvalidConfiguration naming the violated invariant.
void validate_configuration(const ClusterConfiguration& theta, int p);

/// Relative SPD tolerance used by validation: smallest eigenvalue must
/// exceed kSpdTolerance times the largest.
inline constexpr double kSpdTolerance = 1e-12;

}  // namespace qsel
