#include "qsel/standardize.hpp"

#include <cmath>

namespace qsel {

StandardizeResult standardize(const DataMatrix& data) {
  if (data.n() < 2) throw EmptyData("standardize requires n >= 2");
  StandardizeResult out;
  out.data = data;
  const int n = data.n();
  for (int j = 0; j < data.p(); ++j) {
    Eigen::VectorXd col = data.values.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n - 1));
    if (sd > 0.0) {
      col /= sd;
    } else {
      out.zero_variance_columns.push_back(j);
    }
    out.data.values.col(j) = col;
  }
  return out;
}

}  // namespace qsel
