#pragma once

#include <Eigen/Dense>

#include "qsel/types.hpp"

namespace qsel {

enum class ScoreMode { Hard, Smooth };

/// Per-point cluster membership weights. Hard rows are one-hot; smooth
/// rows are the softmax of the quadratic scores. Rows sum to 1.
struct ScoreWeights {
  Eigen::MatrixXd weights;  // n x K
  ScoreMode mode = ScoreMode::Smooth;
};

/// Quadratic scores of every point under every cluster of a configuration,
/// qs(x_i, theta_k) = log pi_k - 1/2 log det Sigma_k - 1/2 maha^2(x_i),
/// together with the constant c that separates qs from the Gaussian
/// log joint: qs(i,k) = c + log(pi_k phi(x_i; mu_k, Sigma_k)).
class GaussianEvaluation {
 public:
  GaussianEvaluation(Eigen::MatrixXd qs, double c)
      : qs_(std::move(qs)), c_(c) {}

  const Eigen::MatrixXd& qs() const { return qs_; }
  double score_constant() const { return c_; }
  int n() const { return static_cast<int>(qs_.rows()); }
  int k() const { return static_cast<int>(qs_.cols()); }

  double log_component(int i, int k) const { return qs_(i, k) - c_; }

  /// Per-point max_k qs(i,k).
  Eigen::VectorXd row_max() const;

  /// log psi_phi(x_i; theta), the mixture log density per point.
  Eigen::VectorXd log_mixture() const;

 private:
  Eigen::MatrixXd qs_;  // n x K, column-major
  double c_;
};

/// Cholesky-based evaluation of the full score matrix; throws
/// SingularSigma when a scatter matrix cannot be factorized.
GaussianEvaluation evaluate_scores(const DataMatrix& data, const ClusterConfiguration& theta);

/// Quadratic score of a single point under one cluster triplet.
double quadratic_score(const Eigen::VectorXd& x, const ClusterTriplet& triplet);

/// Assignment of each point to its score-maximizing cluster; exact ties go
/// to the lowest cluster index.
Partition quadratic_partition(const GaussianEvaluation& eval);
Partition quadratic_partition(const DataMatrix& data, const ClusterConfiguration& theta);

/// Hard score criterion H_n: mean over points of the assigned-cluster score.
double hard_score(const GaussianEvaluation& eval);
double hard_score(const DataMatrix& data, const ClusterConfiguration& theta);

/// Smooth score criterion T_n: mean over points of the softmax-weighted score.
double smooth_score(const GaussianEvaluation& eval);
double smooth_score(const DataMatrix& data, const ClusterConfiguration& theta);

/// Softmax of the quadratic scores, normalized over clusters per point.
ScoreWeights smooth_weights(const GaussianEvaluation& eval);
ScoreWeights smooth_weights(const DataMatrix& data, const ClusterConfiguration& theta);

/// Posterior component weights pi_k phi_k / psi_phi under the Gaussian
/// density, computed through the mixture log density.
ScoreWeights posterior_weights(const GaussianEvaluation& eval);
ScoreWeights posterior_weights(const DataMatrix& data, const ClusterConfiguration& theta);

/// Per-row argmax of the weights, ties to the lowest index.
Partition map_assign(const ScoreWeights& weights);

/// Mean over points of the assignment entropy -sum_k w log w, with
/// 0 log 0 := 0; lies in [0, log K].
double assignment_entropy(const ScoreWeights& weights);

/// Complete-data log-likelihood sum_i log(pi_{z_i} phi(x_i; z_i)).
double complete_data_loglik(const DataMatrix& data, const ClusterConfiguration& theta,
                            const Partition& z);
double complete_data_loglik(const GaussianEvaluation& eval, const Partition& z);

/// Mixture log-likelihood sum_i log psi_phi(x_i; theta).
double mixture_loglik(const DataMatrix& data, const ClusterConfiguration& theta);
double mixture_loglik(const GaussianEvaluation& eval);

/// Dispatch used by the resampling criteria.
double in_sample_score(const GaussianEvaluation& eval, ScoreMode mode);
double in_sample_score(const DataMatrix& data, const ClusterConfiguration& theta, ScoreMode mode);

}  // namespace qsel
