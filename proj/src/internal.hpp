#pragma once

// Shared helpers between the backend translation units; not installed.

#include <Eigen/Dense>
#include <vector>

#include "qsel/backends.hpp"
#include "qsel/rng.hpp"
#include "qsel/types.hpp"

namespace qsel::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double truncation_objective(const std::vector<double>& e, const std::vector<double>& w,
                            double gamma, double m);
double optimal_truncation_threshold(const std::vector<double>& e, const std::vector<double>& w,
                                    double gamma);
std::vector<double> erc_truncate(const std::vector<double>& eigenvalues,
                                 const std::vector<double>& weights, double gamma);

/// Index of the nearest row of `centers` (squared Euclidean, lowest index wins ties).
int nearest_row(const RowMatrix& centers, const double* point, int p);

/// k-means++ seeding: D^2-weighted draws over the rows of x.
std::vector<int> kmeanspp_seed_rows(const RowMatrix& x, int k, SeededRng& rng);

/// Greedy PAM BUILD over a precomputed dissimilarity matrix.
std::vector<int> pam_build(const Eigen::MatrixXd& dist, int k);

/// Pairwise Euclidean distances of the rows.
Eigen::MatrixXd pairwise_distances(const RowMatrix& x);

/// Initial hard partition for an iterative fit.
Partition initial_partition(const RowMatrix& x, int k, InitMethod init, SeededRng& rng);

/// Floors all eigenvalues, then applies the weighted eigen-ratio
/// truncation across the whole set (weights are per matrix, e.g. soft
/// counts). Returns the number of matrices that had an eigenvalue floored.
int regularize_scatters(std::vector<Eigen::MatrixXd>& scatters, const std::vector<double>& weights,
                        double floor, double gamma);

FitResult fit_kmeans(const DataMatrix& data, const MethodSpec& spec, SeededRng& rng,
                     std::vector<double>* sse_trace = nullptr);
FitResult fit_kmedoids(const DataMatrix& data, const MethodSpec& spec, SeededRng& rng);
FitResult fit_gaussian_em(const DataMatrix& data, const MethodSpec& spec, SeededRng& rng,
                          std::vector<double>* loglik_trace);

}  // namespace qsel::detail
