#include "qsel/qscore.hpp"

#include <cmath>

#include "qsel/kernels.hpp"

namespace qsel {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

struct CholFactor {
  Eigen::MatrixXd lower;
  double log_det = 0.0;
};

CholFactor factorize(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw SingularSigma("scatter matrix is not positive definite");
  }
  CholFactor f;
  f.lower = llt.matrixL();
  double log_det = 0.0;
  double min_diag = f.lower(0, 0), max_diag = f.lower(0, 0);
  for (Eigen::Index i = 0; i < f.lower.rows(); ++i) {
    const double d = f.lower(i, i);
    min_diag = std::min(min_diag, d);
    max_diag = std::max(max_diag, d);
    log_det += std::log(d);
  }
  if (!(min_diag > 0.0) || !std::isfinite(log_det) ||
      min_diag * min_diag <= 1e-300 * std::max(1.0, max_diag * max_diag)) {
    throw SingularSigma("scatter matrix factorization is numerically singular");
  }
  f.log_det = 2.0 * log_det;
  return f;
}

}  // namespace

GaussianEvaluation evaluate_scores(const DataMatrix& data, const ClusterConfiguration& theta) {
  const int n = data.n();
  const int p = data.p();
  const int K = theta.k();
  if (K < 1) throw InvalidConfiguration("configuration has no clusters");
  if (theta.dim() != p) {
    throw InvalidConfiguration("configuration dimension does not match the data");
  }
  Eigen::MatrixXd qs(n, K);
  for (int k = 0; k < K; ++k) {
    const ClusterTriplet& t = theta.triplets[static_cast<std::size_t>(k)];
    const CholFactor f = factorize(t.sigma);
    const double constant = std::log(t.pi) - 0.5 * f.log_det;
    // Whitened residuals: solve L y = (x - mu) for every point at once.
    Eigen::MatrixXd centered = (data.values.rowwise() - t.mu.transpose()).transpose();
    f.lower.triangularView<Eigen::Lower>().solveInPlace(centered);
    qs.col(k) = (-0.5 * centered.colwise().squaredNorm().array() + constant).transpose();
  }
  return GaussianEvaluation(std::move(qs), 0.5 * p * kLog2Pi);
}

double quadratic_score(const Eigen::VectorXd& x, const ClusterTriplet& triplet) {
  if (x.size() != triplet.mu.size()) {
    throw InvalidConfiguration("point dimension does not match the triplet");
  }
  const CholFactor f = factorize(triplet.sigma);
  Eigen::VectorXd centered = x - triplet.mu;
  f.lower.triangularView<Eigen::Lower>().solveInPlace(centered);
  return std::log(triplet.pi) - 0.5 * f.log_det - 0.5 * centered.squaredNorm();
}

Eigen::VectorXd GaussianEvaluation::row_max() const {
  const auto nn = static_cast<std::size_t>(n());
  Eigen::VectorXd best = qs_.col(0);
  for (int k = 1; k < this->k(); ++k) {
    kernels::rowmax_update(best.data(), qs_.col(k).data(), nn);
  }
  return best;
}

Eigen::VectorXd GaussianEvaluation::log_mixture() const {
  const auto nn = static_cast<std::size_t>(n());
  const Eigen::VectorXd m = row_max();
  Eigen::VectorXd denom = Eigen::VectorXd::Zero(n());
  for (int k = 0; k < this->k(); ++k) {
    kernels::exp_diff_accum(denom.data(), qs_.col(k).data(), m.data(), nn);
  }
  Eigen::VectorXd out(n());
  for (int i = 0; i < n(); ++i) out(i) = m(i) - c_ + std::log(denom(i));
  return out;
}

Partition quadratic_partition(const GaussianEvaluation& eval) {
  const auto nn = static_cast<std::size_t>(eval.n());
  Eigen::VectorXd best = eval.qs().col(0);
  std::vector<std::int32_t> arg(nn, 0);
  for (int k = 1; k < eval.k(); ++k) {
    kernels::argmax_update(best.data(), arg.data(), eval.qs().col(k).data(), k, nn);
  }
  Partition part;
  part.k = eval.k();
  part.labels.assign(arg.begin(), arg.end());
  return part;
}

Partition quadratic_partition(const DataMatrix& data, const ClusterConfiguration& theta) {
  return quadratic_partition(evaluate_scores(data, theta));
}

double hard_score(const GaussianEvaluation& eval) {
  const Eigen::VectorXd best = eval.row_max();
  return kernels::sum(best.data(), static_cast<std::size_t>(eval.n())) / eval.n();
}

double hard_score(const DataMatrix& data, const ClusterConfiguration& theta) {
  return hard_score(evaluate_scores(data, theta));
}

double smooth_score(const GaussianEvaluation& eval) {
  const auto nn = static_cast<std::size_t>(eval.n());
  const Eigen::VectorXd m = eval.row_max();
  Eigen::VectorXd denom = Eigen::VectorXd::Zero(eval.n());
  Eigen::VectorXd numer = Eigen::VectorXd::Zero(eval.n());
  for (int k = 0; k < eval.k(); ++k) {
    kernels::exp_diff_accum(denom.data(), eval.qs().col(k).data(), m.data(), nn);
    kernels::exp_diff_mul_accum(numer.data(), eval.qs().col(k).data(), m.data(), nn);
  }
  return kernels::ratio_sum(numer.data(), denom.data(), nn) / eval.n();
}

double smooth_score(const DataMatrix& data, const ClusterConfiguration& theta) {
  return smooth_score(evaluate_scores(data, theta));
}

ScoreWeights smooth_weights(const GaussianEvaluation& eval) {
  const auto nn = static_cast<std::size_t>(eval.n());
  const Eigen::VectorXd m = eval.row_max();
  ScoreWeights out;
  out.mode = ScoreMode::Smooth;
  out.weights.resize(eval.n(), eval.k());
  Eigen::VectorXd denom = Eigen::VectorXd::Zero(eval.n());
  for (int k = 0; k < eval.k(); ++k) {
    kernels::exp_diff_store(out.weights.col(k).data(), eval.qs().col(k).data(), m.data(), nn);
    denom += out.weights.col(k);
  }
  for (int k = 0; k < eval.k(); ++k) {
    kernels::divide_inplace(out.weights.col(k).data(), denom.data(), nn);
  }
  return out;
}

ScoreWeights smooth_weights(const DataMatrix& data, const ClusterConfiguration& theta) {
  return smooth_weights(evaluate_scores(data, theta));
}

ScoreWeights posterior_weights(const GaussianEvaluation& eval) {
  // Through the mixture density: omega = exp(log pi_k phi_k - log psi).
  const auto nn = static_cast<std::size_t>(eval.n());
  const Eigen::VectorXd log_mix = eval.log_mixture();
  Eigen::VectorXd shift(eval.n());
  for (int i = 0; i < eval.n(); ++i) shift(i) = log_mix(i) + eval.score_constant();
  ScoreWeights out;
  out.mode = ScoreMode::Smooth;
  out.weights.resize(eval.n(), eval.k());
  for (int k = 0; k < eval.k(); ++k) {
    kernels::exp_diff_store(out.weights.col(k).data(), eval.qs().col(k).data(), shift.data(), nn);
  }
  return out;
}

ScoreWeights posterior_weights(const DataMatrix& data, const ClusterConfiguration& theta) {
  return posterior_weights(evaluate_scores(data, theta));
}

Partition map_assign(const ScoreWeights& weights) {
  const auto n = weights.weights.rows();
  const auto nn = static_cast<std::size_t>(n);
  Eigen::VectorXd best = weights.weights.col(0);
  std::vector<std::int32_t> arg(nn, 0);
  for (int k = 1; k < weights.weights.cols(); ++k) {
    kernels::argmax_update(best.data(), arg.data(), weights.weights.col(k).data(), k, nn);
  }
  Partition part;
  part.k = static_cast<int>(weights.weights.cols());
  part.labels.assign(arg.begin(), arg.end());
  return part;
}

double assignment_entropy(const ScoreWeights& weights) {
  const auto n = weights.weights.rows();
  const auto K = weights.weights.cols();
  double total = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    const double* w = weights.weights.col(k).data();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w[i] > 0.0) total -= w[i] * std::log(w[i]);
    }
  }
  return total / static_cast<double>(n);
}

double complete_data_loglik(const GaussianEvaluation& eval, const Partition& z) {
  if (z.n() != eval.n()) throw LengthMismatch("partition length does not match data");
  double total = 0.0;
  for (int i = 0; i < eval.n(); ++i) {
    total += eval.qs()(i, z.labels[static_cast<std::size_t>(i)]) - eval.score_constant();
  }
  return total;
}

double complete_data_loglik(const DataMatrix& data, const ClusterConfiguration& theta,
                            const Partition& z) {
  if (z.k != theta.k()) throw LengthMismatch("partition K does not match configuration");
  return complete_data_loglik(evaluate_scores(data, theta), z);
}

double mixture_loglik(const GaussianEvaluation& eval) {
  const Eigen::VectorXd lm = eval.log_mixture();
  return kernels::sum(lm.data(), static_cast<std::size_t>(eval.n()));
}

double mixture_loglik(const DataMatrix& data, const ClusterConfiguration& theta) {
  return mixture_loglik(evaluate_scores(data, theta));
}

double in_sample_score(const GaussianEvaluation& eval, ScoreMode mode) {
  return mode == ScoreMode::Hard ? hard_score(eval) : smooth_score(eval);
}

double in_sample_score(const DataMatrix& data, const ClusterConfiguration& theta, ScoreMode mode) {
  return in_sample_score(evaluate_scores(data, theta), mode);
}

}  // namespace qsel
