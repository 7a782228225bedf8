#include "qsel/criteria.hpp"

#include <cmath>
#include <map>

#include "internal.hpp"
#include "qsel/kernels.hpp"
#include "qsel/metrics.hpp"
#include "qsel/qscore.hpp"

namespace qsel {

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::AIC: return "AIC";
    case Criterion::BIC: return "BIC";
    case Criterion::ICL: return "ICL";
    case Criterion::CH: return "CH";
    case Criterion::ASW: return "ASW";
    case Criterion::FW: return "FW";
    case Criterion::CVLK: return "CVLK";
    case Criterion::QH: return "QH";
    case Criterion::QS: return "QS";
    case Criterion::CVQH: return "CVQH";
    case Criterion::CVQS: return "CVQS";
    case Criterion::BQH: return "BQH";
    case Criterion::BQS: return "BQS";
  }
  return "?";
}

Criterion criterion_from_string(const std::string& s) {
  static const std::map<std::string, Criterion> table = {
      {"AIC", Criterion::AIC},   {"BIC", Criterion::BIC},   {"ICL", Criterion::ICL},
      {"CH", Criterion::CH},     {"ASW", Criterion::ASW},   {"FW", Criterion::FW},
      {"CVLK", Criterion::CVLK}, {"QH", Criterion::QH},     {"QS", Criterion::QS},
      {"CVQH", Criterion::CVQH}, {"CVQS", Criterion::CVQS}, {"BQH", Criterion::BQH},
      {"BQS", Criterion::BQS},
  };
  auto it = table.find(s);
  if (it == table.end()) throw ConfigError("unknown criterion: " + s);
  return it->second;
}

std::pair<double, double> aic_bic(const FitResult& fit, int n) {
  if (fit.backend != Backend::GaussianEM) {
    throw NotApplicable("AIC/BIC require a likelihood backend");
  }
  const double nu = fit.n_params;
  return {2.0 * fit.objective - 2.0 * nu, 2.0 * fit.objective - std::log(n) * nu};
}

double icl(const FitResult& fit, const DataMatrix& data) {
  if (fit.backend != Backend::GaussianEM) {
    throw NotApplicable("ICL requires a likelihood backend");
  }
  const GaussianEvaluation eval = evaluate_scores(data, fit.theta);
  const ScoreWeights omega = posterior_weights(eval);
  // E[clik | X] = sum_ik omega_ik log(pi_k phi_ik)
  double expected_clik = 0.0;
  for (int k = 0; k < eval.k(); ++k) {
    const double* w = omega.weights.col(k).data();
    const double* q = eval.qs().col(k).data();
    for (int i = 0; i < eval.n(); ++i) {
      expected_clik += w[i] * (q[i] - eval.score_constant());
    }
  }
  return 2.0 * expected_clik - std::log(data.n()) * fit.n_params;
}

double calinski_harabasz(const DataMatrix& data, const Partition& partition) {
  if (partition.k < 2) throw NotApplicable("CH needs at least two clusters");
  if (partition.n() != data.n()) throw LengthMismatch("partition length does not match data");
  const int n = data.n();
  const int K = partition.k;

  // With squared Euclidean dissimilarity the point scatters reduce to
  // within / between sums of squares (times a common factor of 2).
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, data.p());
  for (int i = 0; i < n; ++i) {
    const int g = partition.labels[static_cast<std::size_t>(i)];
    counts[static_cast<std::size_t>(g)]++;
    sums.row(g) += data.values.row(i);
  }
  double wss = 0.0;
  for (int i = 0; i < n; ++i) {
    const int g = partition.labels[static_cast<std::size_t>(i)];
    const Eigen::RowVectorXd center = sums.row(g) / counts[static_cast<std::size_t>(g)];
    wss += (data.values.row(i) - center).squaredNorm();
  }
  const Eigen::RowVectorXd grand = data.values.colwise().mean();
  double tss = 0.0;
  for (int i = 0; i < n; ++i) tss += (data.values.row(i) - grand).squaredNorm();
  const double bss = tss - wss;
  if (wss == 0.0) throw DegenerateScatter("within scatter is zero");
  return bss * (n - K) / (wss * (K - 1));
}

double average_silhouette_width(const DataMatrix& data, const Partition& partition) {
  if (partition.k < 2) throw NotApplicable("ASW needs at least two clusters");
  if (partition.n() != data.n()) throw LengthMismatch("partition length does not match data");
  const int n = data.n();
  const int K = partition.k;
  const detail::RowMatrix x = data.values;
  const Eigen::MatrixXd dist = detail::pairwise_distances(x);

  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int label : partition.labels) counts[static_cast<std::size_t>(label)]++;

  double total = 0.0;
  std::vector<double> cluster_sums(static_cast<std::size_t>(K));
  for (int i = 0; i < n; ++i) {
    const int own = partition.labels[static_cast<std::size_t>(i)];
    if (counts[static_cast<std::size_t>(own)] == 1) continue;  // s(i) = 0
    std::fill(cluster_sums.begin(), cluster_sums.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      cluster_sums[static_cast<std::size_t>(partition.labels[static_cast<std::size_t>(j)])] +=
          dist(i, j);
    }
    const double a = cluster_sums[static_cast<std::size_t>(own)] /
                     (counts[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int g = 0; g < K; ++g) {
      if (g == own) continue;
      b = std::min(b, cluster_sums[static_cast<std::size_t>(g)] /
                          counts[static_cast<std::size_t>(g)]);
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / n;
}

double pair_mismatch_rate(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw LengthMismatch("label vectors differ in length");
  const std::size_t n = a.size();
  long long mismatches = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool ca = a[i] == a[j];
      const bool cb = b[i] == b[j];
      if (ca != cb) ++mismatches;
    }
  }
  return static_cast<double>(mismatches) / (static_cast<double>(n) * static_cast<double>(n));
}

double fw_stability(const DataMatrix& data, const MethodSpec& spec, int b, SeededRng& rng) {
  if (spec.k < 2) throw NotApplicable("stability is trivially zero for K=1");
  const int n = data.n();
  int failures = 0;
  double total = 0.0;
  int successes = 0;
  for (int pair = 0; pair < b; ++pair) {
    std::vector<int> labels[2];
    bool ok = true;
    for (int side = 0; side < 2 && ok; ++side) {
      SeededRng idx_rng = rng.substream(0x6677, static_cast<std::uint64_t>(pair),
                                        static_cast<std::uint64_t>(side));
      std::vector<int> rows(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)] =
            static_cast<int>(idx_rng.uniform_int(static_cast<std::uint32_t>(n)));
      }
      const DataMatrix resample = data.take_rows(rows);
      SeededRng fit_rng = rng.substream(0x6678 ^ stream_key(spec.id()),
                                        static_cast<std::uint64_t>(pair),
                                        static_cast<std::uint64_t>(side));
      try {
        const FitResult f = fit(resample, spec, fit_rng);
        labels[side] = assign_to_fit(data, f).labels;
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) {
      ++failures;
      continue;
    }
    total += pair_mismatch_rate(labels[0], labels[1]);
    ++successes;
  }
  if (4 * failures > b) {
    throw TooManyFailures("more than 25% of stability pair fits failed");
  }
  if (successes == 0) throw TooManyFailures("no successful stability pair");
  return -total / successes;
}

double cvlk(const DataMatrix& data, const MethodSpec& spec, int folds, SeededRng& rng) {
  if (spec.backend != Backend::GaussianEM) {
    throw NotApplicable("CVLK requires a likelihood backend");
  }
  if (folds < 2) throw InvalidConfiguration("CVLK needs at least two folds");
  const int n = data.n();
  SeededRng fold_rng = rng.substream(0x6376);
  const std::vector<int> ids = fold_rng.shuffled_indices(n);
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    fold[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] = i % folds;
  }

  double total = 0.0;
  int successes = 0;
  int failures = 0;
  for (int t = 0; t < folds; ++t) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) {
      (fold[static_cast<std::size_t>(i)] == t ? test : train).push_back(i);
    }
    if (static_cast<int>(train.size()) < spec.k) {
      throw FoldTooSmall("training fold smaller than k");
    }
    SeededRng fit_rng = rng.substream(0x6377 ^ stream_key(spec.id()), static_cast<std::uint64_t>(t));
    try {
      const DataMatrix train_data = data.take_rows(train);
      const DataMatrix test_data = data.take_rows(test);
      const FitResult f = fit(train_data, spec, fit_rng);
      total += mixture_loglik(test_data, f.theta) / static_cast<double>(test.size());
      ++successes;
    } catch (const Error&) {
      ++failures;
    }
  }
  if (4 * failures > folds) {
    throw TooManyFailures("more than 25% of CVLK folds failed");
  }
  if (successes == 0) throw TooManyFailures("no successful CVLK fold");
  return total / successes;
}

}  // namespace qsel
