#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qsel/rng.hpp"
#include "qsel/types.hpp"

namespace qsel {

enum class Backend { KMeans, KMedoids, GaussianEM };

/// The six closed-form covariance parametrizations kept from the usual
/// volume/shape/orientation taxonomy.
enum class CovarianceModel { EII, VII, EEI, VVI, EEE, VVV };

enum class InitMethod { KMeansPlusPlus, PamBuild, RandomPartition };

inline constexpr double kGammaUnbounded = std::numeric_limits<double>::infinity();

/// One candidate method of the menu: a backend plus its hyper-parameters.
struct MethodSpec {
  Backend backend = Backend::KMeans;
  int k = 1;
  CovarianceModel model = CovarianceModel::VVV;  // GaussianEM only
  double gamma = kGammaUnbounded;                // eigen-ratio bound, GaussianEM only
  InitMethod init = InitMethod::KMeansPlusPlus;
  int restarts = 1;
  int max_iter = 500;
  double tol = 1e-8;

  /// Canonical identifier, e.g. "gem-VVV-g100-k3" or "kmeans-k3"; doubles
  /// as the hash input for per-method RNG streams.
  std::string id() const;
};

std::string to_string(Backend b);
std::string to_string(CovarianceModel m);
std::string to_string(InitMethod m);
Backend backend_from_string(const std::string& s);
CovarianceModel covariance_model_from_string(const std::string& s);  // UnsupportedModel for the excluded ones
InitMethod init_from_string(const std::string& s);

struct FitResult {
  ClusterConfiguration theta;
  Partition partition;
  double objective = 0.0;  // GaussianEM: mixture log-likelihood; KMeans: -SSE; KMedoids: -total dissimilarity
  int n_params = 0;
  bool converged = false;
  int iterations = 0;
  Backend backend = Backend::KMeans;
  Eigen::MatrixXd centers;  // K x p centers (KMeans), medoids (KMedoids) or means (GaussianEM)
};

/// Fits a method to the data, taking the best of `restarts` runs.
/// Throws NotEnoughPoints when spec.k > n and DegenerateFit when every
/// restart collapses.
FitResult fit(const DataMatrix& data, const MethodSpec& spec, SeededRng& rng);

/// Cluster triplets of an arbitrary hard partition: sizes n_k/n, within
/// means, and within ML covariances floored and eigen-ratio regularized.
ClusterConfiguration triplets_from_partition(const DataMatrix& data, const Partition& partition,
                                             double gamma);

/// Applies the eigen-ratio constraint across all matrices by optimal
/// eigenvalue truncation. Inputs already satisfying the bound are returned
/// bit-identical.
std::vector<Eigen::MatrixXd> enforce_erc(const std::vector<Eigen::MatrixXd>& sigmas, double gamma);

/// Number of free mixture parameters for a GaussianEM spec at dimension p.
int count_free_params(const MethodSpec& spec, int p);
int count_free_params(CovarianceModel model, int k, int p);

/// Maps out-of-sample points onto a fitted solution: nearest center for
/// KMeans, nearest medoid for KMedoids, MAP under the triplets for
/// GaussianEM.
Partition assign_to_fit(const DataMatrix& data, const FitResult& fit);

/// Eigenvalue floor applied to extracted and fitted scatter matrices,
/// relative to the average total variance of the data.
double covariance_floor(const DataMatrix& data);

}  // namespace qsel
