#include "qsel/types.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace qsel {

void DataMatrix::validate() const {
  if (values.rows() < 1 || values.cols() < 1) {
    throw EmptyData("data matrix must have n >= 1 and p >= 1");
  }
  if (!values.allFinite()) {
    throw InvalidConfiguration("data matrix contains a non-finite entry");
  }
  if (labels) {
    if (static_cast<int>(labels->size()) != n()) {
      throw InvalidConfiguration("label vector length does not match n");
    }
    std::set<int> distinct(labels->begin(), labels->end());
    if (distinct.empty()) {
      throw InvalidConfiguration("labels present but empty");
    }
  }
}

DataMatrix DataMatrix::take_rows(const std::vector<int>& rows) const {
  DataMatrix out;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(rows[i]);
  }
  out.feature_names = feature_names;
  return out;
}

namespace {

void validate_triplet(const ClusterTriplet& t, int p, int index) {
  std::ostringstream tag;
  tag << "triplet " << index << ": ";
  if (t.mu.size() != p) {
    throw InvalidConfiguration(tag.str() + "mean dimension does not match p");
  }
  if (t.sigma.rows() != p || t.sigma.cols() != p) {
    throw InvalidConfiguration(tag.str() + "sigma is not p x p");
  }
  if (!(t.pi > 0.0) || t.pi > 1.0) {
    throw InvalidConfiguration(tag.str() + "pi must lie in (0, 1]");
  }
  if (!t.sigma.allFinite() || !t.mu.allFinite()) {
    throw InvalidConfiguration(tag.str() + "non-finite parameter");
  }
  const double scale = std::max(1.0, t.sigma.cwiseAbs().maxCoeff());
  if ((t.sigma - t.sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidConfiguration(tag.str() + "sigma is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.sigma, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || lo <= kSpdTolerance * std::abs(hi)) {
    throw InvalidConfiguration(tag.str() + "sigma is not positive definite");
  }
}

}  // namespace

void validate_configuration(const ClusterConfiguration& theta, int p) {
  if (theta.triplets.empty()) {
    throw InvalidConfiguration("configuration has no clusters");
  }
  double pi_sum = 0.0;
  for (int k = 0; k < theta.k(); ++k) {
    validate_triplet(theta.triplets[k], p, k);
    pi_sum += theta.triplets[k].pi;
  }
  if (std::abs(pi_sum - 1.0) > 1e-9) {
    throw InvalidConfiguration("mixing proportions do not sum to 1");
  }
}

}  // namespace qsel
