#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qsel/dgp.hpp"
#include "qsel/qscore.hpp"

using namespace qsel;

namespace {

Eigen::MatrixXd label_conditional_cov(const DataMatrix& data, int label) {
  std::vector<int> rows;
  for (int i = 0; i < data.n(); ++i) {
    if ((*data.labels)[static_cast<std::size_t>(i)] == label) rows.push_back(i);
  }
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), data.p());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = data.values.row(rows[i]);
  const Eigen::RowVectorXd mean = sub.colwise().mean();
  const Eigen::MatrixXd centered = sub.rowwise() - mean;
  return centered.transpose() * centered / (static_cast<double>(rows.size()) - 1.0);
}

double label_frequency(const DataMatrix& data, int label) {
  int count = 0;
  for (int v : *data.labels) count += (v == label);
  return static_cast<double>(count) / data.n();
}

}  // namespace

TEST_CASE("uniform design: analytic moments at n=1e5") {
  SeededRng rng(80, 0);
  const DataMatrix data = sample({Design::Uniform, 100000, 0.0}, rng);
  REQUIRE(data.p() == 2);
  const double se_mean = std::sqrt(1.0 / 12.0 / 100000.0);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(data.values.col(j).mean() - 0.5) < 3.0 * se_mean);
    const double var = (data.values.col(j).array() - data.values.col(j).mean()).square().sum() /
                       (data.n() - 1.0);
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  }
}

TEST_CASE("pentagon5: component frequencies and unit scatters") {
  SeededRng rng(81, 0);
  const DataMatrix data = sample({Design::Pentagon5, 100000, 0.0}, rng);
  const double se4 = std::sqrt(0.05 * 0.95 / 100000.0);
  CHECK(std::abs(label_frequency(data, 3) - 0.05) < 3.0 * se4);
  CHECK(std::abs(label_frequency(data, 1) - 0.35) < 3.0 * std::sqrt(0.35 * 0.65 / 100000.0));
  const Eigen::MatrixXd cov = label_conditional_cov(data, 0);
  CHECK(cov(0, 0) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(cov(1, 1) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(cov(0, 1)) < 0.03);
}

TEST_CASE("t52d: Student-t components carry the listed covariance") {
  SeededRng rng(82, 0);
  const DataMatrix data = sample({Design::T52D, 200000, 0.0}, rng);
  const Eigen::MatrixXd cov1 = label_conditional_cov(data, 0);
  // component 1: [[1, .5], [.5, 1]] within 3 MC standard errors (~0.01)
  CHECK(cov1(0, 0) == doctest::Approx(1.0).epsilon(0.04));
  CHECK(cov1(1, 1) == doctest::Approx(1.0).epsilon(0.04));
  CHECK(cov1(0, 1) == doctest::Approx(0.5).epsilon(0.08));
  // component mean
  std::vector<int> rows;
  for (int i = 0; i < data.n(); ++i) {
    if ((*data.labels)[static_cast<std::size_t>(i)] == 0) rows.push_back(i);
  }
  double mx = 0.0, my = 0.0;
  for (int r : rows) {
    mx += data.values(r, 0);
    my += data.values(r, 1);
  }
  CHECK(mx / rows.size() == doctest::Approx(0.0).epsilon(0.05));
  CHECK(my / rows.size() == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("t510d: ten dimensions, uninformative tail coordinates") {
  SeededRng rng(83, 0);
  const DataMatrix data = sample({Design::T510D, 50000, 0.0}, rng);
  REQUIRE(data.p() == 10);
  for (int j = 2; j < 10; ++j) {
    CHECK(std::abs(data.values.col(j).mean()) < 0.02);
    const double var = (data.values.col(j).array() - data.values.col(j).mean()).square().sum() /
                       (data.n() - 1.0);
    CHECK(var == doctest::Approx(1.0).epsilon(0.03));
  }
}

TEST_CASE("flower2: five balanced components, plausible geometry") {
  SeededRng rng(84, 0);
  const DataMatrix data = sample({Design::Flower2, 100000, 0.0}, rng);
  for (int k = 0; k < 5; ++k) {
    CHECK(label_frequency(data, k) == doctest::Approx(0.2).epsilon(0.03));
  }
  // the rotated rectangles keep their distance-from-origin range
  double max_norm_rect = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    if ((*data.labels)[static_cast<std::size_t>(i)] == 0) {
      max_norm_rect = std::max(max_norm_rect, data.values.row(i).norm());
    }
  }
  CHECK(max_norm_rect <= std::sqrt(101.0) + 1e-9);  // corner (1,10) under rotation
  CHECK(max_norm_rect > 9.0);
  // Gaussian component sits at the origin
  const Eigen::MatrixXd cov5 = label_conditional_cov(data, 4);
  CHECK(cov5(0, 0) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(cov5(1, 1) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("dgpU: mixture of two uniform squares") {
  SeededRng rng(85, 0);
  const DataMatrix data = sample({Design::DgpU, 100000, 3.0}, rng);
  for (int i = 0; i < 200; ++i) {
    const double x = data.values(i, 0);
    CHECK(((x >= -1.0 && x <= 1.0) || (x >= 2.0 && x <= 4.0)));
    CHECK(data.values(i, 1) >= -1.0);
    CHECK(data.values(i, 1) <= 1.0);
  }
}

TEST_CASE("reference_configurations: closed forms and the MC cross-check") {
  SUBCASE("dgpU scatter is Var(U(-1,1)) I") {
    const auto [k1, k2] = reference_configurations(Design::DgpU, 2.0);
    CHECK(k2.triplets[0].sigma(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(k2.triplets[0].sigma(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(k2.triplets[0].sigma(0, 1) == 0.0);
  }
  SUBCASE("dgpG at d=0 collapses to a standard normal") {
    const auto [k1, k2] = reference_configurations(Design::DgpG, 0.0);
    CHECK(k1.triplets[0].mu.cwiseAbs().maxCoeff() == 0.0);
    CHECK((k1.triplets[0].sigma - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("dgpG d=4: mixture variance 1 + d^2/4 against an MC moment") {
    const auto [k1, k2] = reference_configurations(Design::DgpG, 4.0);
    CHECK(k1.triplets[0].sigma(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
    SeededRng rng(86, 0);
    const DataMatrix draws = sample({Design::DgpG, 1000000, 4.0}, rng);
    const double mean0 = draws.values.col(0).mean();
    CHECK(mean0 == doctest::Approx(2.0).epsilon(0.01));
    const double var0 =
        (draws.values.col(0).array() - mean0).square().sum() / (draws.n() - 1.0);
    // se of the sample variance of a bounded-kurtosis mixture at n=1e6
    CHECK(std::abs(var0 - 5.0) < 3.0 * 0.008);
  }
}

TEST_CASE("population curve: K=1 hard and smooth scores coincide") {
  const SeededRng rng(87, 0);
  const std::vector<double> grid = {2.0, 3.0};
  const PopulationScoreResult result =
      population_score_curve(Design::DgpG, grid, 2000, 3, rng, 2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(result.h_k1[i] == result.t_k1[i]);  // single cluster: identical estimators
    CHECK(result.se_h_k1[i] >= 0.0);
  }
}

TEST_CASE("population curve: reproducible under the seed regardless of workers") {
  const SeededRng rng(88, 0);
  const std::vector<double> grid = {2.4, 2.8, 3.2};
  const PopulationScoreResult a = population_score_curve(Design::DgpU, grid, 1500, 3, rng, 1);
  const PopulationScoreResult b = population_score_curve(Design::DgpU, grid, 1500, 3, rng, 4);
  CHECK(a.h_k1 == b.h_k1);
  CHECK(a.t_k2 == b.t_k2);
  CHECK(a.se_t_k1 == b.se_t_k1);
}

TEST_CASE("dgpG smooth K=2 curve is flat at its exact constant -ln2 - 1") {
  // T(theta2) under dgpG equals -(H(Z) + h(X|Z)) + c = -ln 2 - 1 for every d.
  const SeededRng rng(91, 0);
  const std::vector<double> grid = {2.5, 3.2, 4.0};
  const PopulationScoreResult r = population_score_curve(Design::DgpG, grid, 60000, 4, rng, 2);
  const double constant = -std::log(2.0) - 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(r.t_k2[i] - constant) < 4.0 * r.se_t_k2[i] + 1e-4);
  }
}

TEST_CASE("dgpU hard K=2 curve is constant ln(3/2) - 1 once supports separate") {
  const SeededRng rng(92, 0);
  const std::vector<double> grid = {2.3, 3.0, 3.8};
  const PopulationScoreResult r = population_score_curve(Design::DgpU, grid, 60000, 4, rng, 2);
  const double constant = std::log(1.5) - 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(r.h_k2[i] - constant) < 4.0 * r.se_h_k2[i] + 1e-4);
  }
}

TEST_CASE("sample reproducibility: identical spec and seed, identical matrix") {
  SeededRng r1(89, 3), r2(89, 3);
  const DataMatrix a = sample({Design::T52D, 500, 0.0}, r1);
  const DataMatrix b = sample({Design::T52D, 500, 0.0}, r2);
  CHECK(a.values == b.values);
  CHECK(*a.labels == *b.labels);
}

TEST_CASE("locate_crossing: interpolation and absence") {
  const std::vector<double> grid = {0.0, 1.0, 2.0};
  CHECK(locate_crossing(grid, {1.0, 0.5, -0.5}, {0.0, 0.0, 0.0}).value() ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK_FALSE(locate_crossing(grid, {1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}).has_value());
}

TEST_CASE("label-conditional moments match the DGP parameters at scale") {
  SeededRng rng(90, 0);
  const DataMatrix data = sample({Design::DgpG, 100000, 5.0}, rng);
  const Eigen::MatrixXd cov = label_conditional_cov(data, 1);
  CHECK(cov(0, 0) == doctest::Approx(1.0).epsilon(0.04));
  CHECK(cov(1, 1) == doctest::Approx(1.0).epsilon(0.04));
}
