#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "internal.hpp"
#include "qsel/backends.hpp"
#include "qsel/metrics.hpp"
#include "qsel/qscore.hpp"
#include "test_helpers.h"

using namespace qsel;

namespace {

DataMatrix two_blobs(SeededRng& rng, int per_blob, double separation, double sd) {
  DataMatrix data;
  data.values.resize(2 * per_blob, 2);
  std::vector<int> labels(static_cast<std::size_t>(2 * per_blob));
  for (int i = 0; i < 2 * per_blob; ++i) {
    const int g = i < per_blob ? 0 : 1;
    labels[static_cast<std::size_t>(i)] = g;
    data.values(i, 0) = (g == 0 ? -separation / 2 : separation / 2) + sd * rng.normal();
    data.values(i, 1) = sd * rng.normal();
  }
  data.labels = labels;
  return data;
}

std::vector<double> all_eigenvalues(const std::vector<Eigen::MatrixXd>& mats) {
  std::vector<double> out;
  for (const auto& m : mats) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  return out;
}

}  // namespace

TEST_CASE("fit: two well-separated blobs are recovered exactly by k-means") {
  SeededRng rng(21, 0);
  const DataMatrix data = two_blobs(rng, 50, 10.0, 0.1);
  MethodSpec spec;
  spec.backend = Backend::KMeans;
  spec.k = 2;
  spec.restarts = 3;
  SeededRng fit_rng(21, 1);
  const FitResult result = fit(data, spec, fit_rng);
  Partition truth;
  truth.k = 2;
  truth.labels = *data.labels;
  CHECK(adjusted_rand_index(result.partition, truth) == 1.0);
  CHECK(result.theta.k() == 2);
}

TEST_CASE("fit: K=1 GaussianEM is the closed-form Gaussian MLE") {
  SeededRng rng(22, 0);
  const DataMatrix data = testhelpers::random_data(rng, 80, 3);
  MethodSpec spec;
  spec.backend = Backend::GaussianEM;
  spec.k = 1;
  spec.model = CovarianceModel::VVV;
  SeededRng fit_rng(22, 1);
  const FitResult result = fit(data, spec, fit_rng);

  const Eigen::VectorXd mean = data.values.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.values.rowwise() - mean.transpose();
  const Eigen::MatrixXd ml_cov = centered.transpose() * centered / data.n();

  CHECK((result.theta.triplets[0].mu - mean).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((result.theta.triplets[0].sigma - ml_cov).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(result.objective == doctest::Approx(mixture_loglik(data, result.theta)).epsilon(1e-10));
}

TEST_CASE("fit: k > n raises NotEnoughPoints") {
  SeededRng rng(23, 0);
  const DataMatrix data = testhelpers::random_data(rng, 5, 2);
  MethodSpec spec;
  spec.backend = Backend::KMeans;
  spec.k = 6;
  SeededRng fit_rng(23, 1);
  CHECK_THROWS_AS(fit(data, spec, fit_rng), NotEnoughPoints);
}

TEST_CASE("triplets_from_partition: moments, floors, singletons") {
  SUBCASE("three collinear points") {
    DataMatrix data;
    data.values.resize(3, 2);
    data.values << 0, 0, 1, 0, 2, 0;
    Partition part;
    part.k = 1;
    part.labels = {0, 0, 0};
    const ClusterConfiguration theta = triplets_from_partition(data, part, kGammaUnbounded);
    CHECK(theta.triplets[0].pi == 1.0);
    CHECK(theta.triplets[0].mu(0) == doctest::Approx(1.0));
    CHECK(theta.triplets[0].mu(1) == 0.0);
    CHECK(theta.triplets[0].sigma(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    // zero-variance direction is floored at 1e-8 * tr(total cov)/p
    const double floor = covariance_floor(data);
    CHECK(floor == doctest::Approx(1e-8 * (2.0 / 3.0) / 2.0).epsilon(1e-9));
    CHECK(theta.triplets[0].sigma(1, 1) == doctest::Approx(floor).epsilon(1e-9));
    CHECK_NOTHROW(validate_configuration(theta, 2));
  }
  SUBCASE("two symmetric singletons with gamma=1 share a spherical floor") {
    DataMatrix data;
    data.values.resize(2, 2);
    data.values << 0, 0, 4, 0;
    Partition part;
    part.k = 2;
    part.labels = {0, 1};
    const ClusterConfiguration theta = triplets_from_partition(data, part, 1.0);
    CHECK((theta.triplets[0].sigma - theta.triplets[1].sigma).cwiseAbs().maxCoeff() == 0.0);
    CHECK(theta.triplets[0].sigma(0, 1) == 0.0);
    CHECK(theta.triplets[0].sigma(0, 0) == doctest::Approx(theta.triplets[0].sigma(1, 1)));
  }
  SUBCASE("empty cluster is rejected") {
    DataMatrix data;
    data.values.resize(2, 1);
    data.values << 0, 1;
    Partition part;
    part.k = 3;
    part.labels = {0, 1};
    CHECK_THROWS_AS(triplets_from_partition(data, part, kGammaUnbounded), EmptyCluster);
  }
  SUBCASE("mixing proportions sum to exactly 1") {
    SeededRng rng(24, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 7 + static_cast<int>(rng.uniform_int(90));
      const int k = 1 + static_cast<int>(rng.uniform_int(5));
      DataMatrix data = testhelpers::random_data(rng, n, 2);
      Partition part;
      part.k = k;
      part.labels.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        part.labels[static_cast<std::size_t>(i)] =
            i < k ? i : static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(k)));
      }
      const ClusterConfiguration theta = triplets_from_partition(data, part, kGammaUnbounded);
      double sum = 0.0;
      for (const auto& t : theta.triplets) sum += t.pi;
      CHECK(sum == 1.0);
    }
  }
}

TEST_CASE("enforce_erc") {
  SUBCASE("inactive constraint returns the input bit-identically") {
    std::vector<Eigen::MatrixXd> sigmas;
    Eigen::Matrix2d a;
    a << 10, 0, 0, 1;
    sigmas.push_back(a);
    const auto out = enforce_erc(sigmas, 100.0);
    CHECK(out[0] == sigmas[0]);
  }
  SUBCASE("gamma=1 equalizes all eigenvalues") {
    std::vector<Eigen::MatrixXd> sigmas;
    Eigen::Matrix2d a, b;
    a << 4, 0, 0, 1;
    b << 9, 0, 0, 2;
    sigmas.push_back(a);
    sigmas.push_back(b);
    const auto out = enforce_erc(sigmas, 1.0);
    const std::vector<double> lam = all_eigenvalues(out);
    for (double v : lam) CHECK(v == doctest::Approx(lam[0]).epsilon(1e-12));
    CHECK(std::abs(out[0](0, 1)) < 1e-14);  // diagonal stays diagonal
  }
  SUBCASE("clipping into [m, 4m] beats random feasible clippings") {
    std::vector<Eigen::MatrixXd> sigmas;
    Eigen::Matrix2d a;
    a << 16, 0, 0, 1;
    sigmas.push_back(a);
    const double gamma = 4.0;
    const auto out = enforce_erc(sigmas, gamma);
    const std::vector<double> lam = all_eigenvalues(out);
    const double ratio = *std::max_element(lam.begin(), lam.end()) /
                         *std::min_element(lam.begin(), lam.end());
    CHECK(ratio <= gamma * (1.0 + 1e-9));

    const std::vector<double> raw = {16.0, 1.0};
    const std::vector<double> w = {1.0, 1.0};
    const double chosen_m = *std::min_element(lam.begin(), lam.end());
    const double best = qsel::detail::truncation_objective(raw, w, gamma, chosen_m);
    SeededRng rng(25, 0);
    for (int trial = 0; trial < 1000; ++trial) {
      const double m = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
      const double f = qsel::detail::truncation_objective(raw, w, gamma, m);
      CHECK(best <= f + 1e-12);
    }
  }
  SUBCASE("idempotence") {
    SeededRng rng(26, 0);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Eigen::MatrixXd> sigmas;
      for (int k = 0; k < 3; ++k) sigmas.push_back(testhelpers::random_spd(rng, 3, 0.01));
      const double gamma = 1.5 + rng.uniform01() * 5.0;
      const auto once = enforce_erc(sigmas, gamma);
      const auto twice = enforce_erc(once, gamma);
      for (int k = 0; k < 3; ++k) {
        CHECK(once[static_cast<std::size_t>(k)] == twice[static_cast<std::size_t>(k)]);
      }
    }
  }
}

TEST_CASE("count_free_params follows the six printed rows") {
  CHECK(count_free_params(CovarianceModel::EII, 3, 4) == 15);  // alpha = 14
  CHECK(count_free_params(CovarianceModel::VVV, 2, 2) == 11);  // alpha = 5, beta = 3
  CHECK(count_free_params(CovarianceModel::EII, 1, 1) == 2);   // mean + variance
  for (int k = 1; k <= 6; ++k) {
    for (int p = 1; p <= 5; ++p) {
      const int alpha = k * p + k - 1;
      const int beta = p * (p + 1) / 2;
      CHECK(count_free_params(CovarianceModel::EII, k, p) == alpha + 1);
      CHECK(count_free_params(CovarianceModel::VII, k, p) == alpha + p);
      CHECK(count_free_params(CovarianceModel::EEI, k, p) == alpha + p);
      CHECK(count_free_params(CovarianceModel::VVI, k, p) == alpha + k * p);
      CHECK(count_free_params(CovarianceModel::EEE, k, p) == alpha + beta);
      CHECK(count_free_params(CovarianceModel::VVV, k, p) == alpha + k * beta);
    }
  }
  MethodSpec kmeans_spec;
  kmeans_spec.backend = Backend::KMeans;
  CHECK_THROWS_AS(count_free_params(kmeans_spec, 2), NotApplicable);
  CHECK_THROWS_AS(covariance_model_from_string("VEV"), UnsupportedModel);
  CHECK_THROWS_AS(covariance_model_from_string("XYZ"), ConfigError);
}

TEST_CASE("EM log-likelihood is monotone for every model and gamma") {
  SeededRng rng(27, 0);
  const CovarianceModel models[] = {CovarianceModel::EII, CovarianceModel::VII,
                                    CovarianceModel::EEI, CovarianceModel::VVI,
                                    CovarianceModel::EEE, CovarianceModel::VVV};
  const double gammas[] = {1.0, 4.0, 100.0, kGammaUnbounded};
  int attempted = 0;
  for (const CovarianceModel model : models) {
    for (const double gamma : gammas) {
      for (int trial = 0; trial < 2; ++trial) {
        const DataMatrix data = two_blobs(rng, 30, 3.0 + trial, 1.0);
        MethodSpec spec;
        spec.backend = Backend::GaussianEM;
        spec.k = 3;
        spec.model = model;
        spec.gamma = gamma;
        spec.restarts = 1;
        SeededRng fit_rng(27, static_cast<std::uint64_t>(++attempted));
        std::vector<double> trace;
        try {
          qsel::detail::fit_gaussian_em(data, spec, fit_rng, &trace);
        } catch (const DegenerateFit&) {
          continue;
        }
        REQUIRE(trace.size() >= 2);
        for (std::size_t i = 1; i < trace.size(); ++i) {
          CHECK(trace[i] >= trace[i - 1] - 1e-9 * (1.0 + std::abs(trace[i - 1])));
        }
      }
    }
  }
  CHECK(attempted == 48);
}

TEST_CASE("k-means SSE never increases across Lloyd iterations") {
  SeededRng rng(32, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const DataMatrix data = two_blobs(rng, 40, 1.0 + trial, 1.5);
    MethodSpec spec;
    spec.backend = Backend::KMeans;
    spec.k = 2 + trial % 4;
    spec.init = trial % 2 ? InitMethod::RandomPartition : InitMethod::KMeansPlusPlus;
    SeededRng fit_rng(32, static_cast<std::uint64_t>(trial));
    std::vector<double> sse;
    try {
      qsel::detail::fit_kmeans(data, spec, fit_rng, &sse);
    } catch (const DegenerateFit&) {
      continue;  // single restart hit the one-repair limit
    }
    REQUIRE(sse.size() >= 2);
    for (std::size_t i = 1; i < sse.size(); ++i) {
      CHECK(sse[i] <= sse[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("more k-means restarts never worsen the best objective") {
  SeededRng rng(28, 0);
  const DataMatrix data = two_blobs(rng, 40, 2.0, 1.5);
  MethodSpec one;
  one.backend = Backend::KMeans;
  one.k = 4;
  one.restarts = 1;
  MethodSpec many = one;
  many.restarts = 8;
  SeededRng rng_a(28, 7), rng_b(28, 7);
  const FitResult few = fit(data, one, rng_a);
  const FitResult more = fit(data, many, rng_b);
  CHECK(more.objective >= few.objective - 1e-12);
}

TEST_CASE("gamma=1 VVV fits are equal and spherical across components") {
  SeededRng rng(29, 0);
  const DataMatrix data = two_blobs(rng, 40, 6.0, 1.0);
  MethodSpec spec;
  spec.backend = Backend::GaussianEM;
  spec.k = 2;
  spec.model = CovarianceModel::VVV;
  spec.gamma = 1.0;
  SeededRng fit_rng(29, 1);
  const FitResult result = fit(data, spec, fit_rng);
  const Eigen::MatrixXd& s0 = result.theta.triplets[0].sigma;
  const Eigen::MatrixXd& s1 = result.theta.triplets[1].sigma;
  CHECK((s0 - s1).cwiseAbs().maxCoeff() < 1e-9);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s0, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-9));
}

TEST_CASE("PAM recovers well-separated blobs") {
  SeededRng rng(30, 0);
  const DataMatrix data = two_blobs(rng, 30, 12.0, 0.5);
  MethodSpec spec;
  spec.backend = Backend::KMedoids;
  spec.k = 2;
  spec.init = InitMethod::PamBuild;
  SeededRng fit_rng(30, 1);
  const FitResult result = fit(data, spec, fit_rng);
  Partition truth;
  truth.k = 2;
  truth.labels = *data.labels;
  CHECK(adjusted_rand_index(result.partition, truth) == 1.0);
  CHECK(result.objective <= 0.0);
  CHECK(result.converged);
}

TEST_CASE("assign_to_fit maps points onto the fitted solution") {
  SeededRng rng(31, 0);
  const DataMatrix data = two_blobs(rng, 30, 8.0, 0.5);
  for (const Backend backend : {Backend::KMeans, Backend::KMedoids, Backend::GaussianEM}) {
    MethodSpec spec;
    spec.backend = backend;
    spec.k = 2;
    SeededRng fit_rng(31, static_cast<std::uint64_t>(backend));
    const FitResult result = fit(data, spec, fit_rng);
    const Partition assigned = assign_to_fit(data, result);
    CHECK(adjusted_rand_index(assigned, result.partition) == 1.0);
  }
}
