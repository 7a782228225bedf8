#include "qsel/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsel/parallel.hpp"

namespace qsel {

namespace {

constexpr std::uint64_t kBootIdxTag = 0x62696478;  // resample indices, method-shared
constexpr std::uint64_t kBootFitTag = 0x62666974;  // per (replicate, method) fit stream
constexpr std::uint64_t kCvFoldTag = 0x63766664;   // fold shuffle, method-shared
constexpr std::uint64_t kCvFitTag = 0x63766674;    // per (fold, method) fit stream

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double empirical_quantile(std::vector<double> values, double a) {
  if (values.empty()) throw InvalidConfiguration("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const auto b = static_cast<double>(values.size());
  // inf{t : (1/B) #\{v <= t\} >= a}: the ceil(a B)-th order statistic.
  auto rank = static_cast<long long>(std::ceil(a * b));
  rank = std::clamp<long long>(rank, 1, static_cast<long long>(values.size()));
  return values[static_cast<std::size_t>(rank - 1)];
}

BootstrapScore bootstrap_summarize(std::vector<double> replicate_scores, double alpha, int n) {
  BootstrapScore out;
  out.alpha = alpha;
  out.replicate_scores = std::move(replicate_scores);
  std::vector<double> ok;
  ok.reserve(out.replicate_scores.size());
  for (double s : out.replicate_scores) {
    if (std::isfinite(s)) {
      ok.push_back(s);
    } else {
      out.failures++;
    }
  }
  if (ok.empty()) throw TooManyFailures("no successful bootstrap replicate");
  out.w_tilde = 0.0;
  for (double s : ok) out.w_tilde += s;
  out.w_tilde /= static_cast<double>(ok.size());

  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> centered(ok.size());
  for (std::size_t i = 0; i < ok.size(); ++i) centered[i] = root_n * (ok[i] - out.w_tilde);
  // Quantiles of the root statistic, reported back on the score scale.
  out.lower = out.w_tilde + empirical_quantile(centered, alpha / 2.0) / root_n;
  out.upper = out.w_tilde + empirical_quantile(centered, 1.0 - alpha / 2.0) / root_n;
  return out;
}

CvScore cv_summarize(std::vector<double> fold_scores, double delta) {
  CvScore out;
  out.delta = delta;
  out.fold_scores = std::move(fold_scores);
  const auto k = static_cast<double>(out.fold_scores.size());
  if (out.fold_scores.empty()) throw TooManyFailures("no successful fold");
  out.mean = 0.0;
  for (double s : out.fold_scores) out.mean += s;
  out.mean /= k;
  bool all_equal = true;
  for (double s : out.fold_scores) all_equal &= (s == out.fold_scores.front());
  if (all_equal) out.mean = out.fold_scores.front();
  double ss = 0.0;
  for (double s : out.fold_scores) ss += (s - out.mean) * (s - out.mean);
  out.sd = (out.fold_scores.size() > 1 && !all_equal) ? std::sqrt(ss / (k - 1.0)) : 0.0;
  out.adjusted = out.mean - delta * out.sd / std::sqrt(k);
  return out;
}

std::vector<int> bootstrap_indices(int n, const SeededRng& rng, int replicate) {
  SeededRng idx_rng = rng.substream(kBootIdxTag, static_cast<std::uint64_t>(replicate));
  std::vector<int> rows(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rows[static_cast<std::size_t>(i)] =
        static_cast<int>(idx_rng.uniform_int(static_cast<std::uint32_t>(n)));
  }
  return rows;
}

std::vector<int> cv_fold_ids(int n, int folds, const SeededRng& rng) {
  SeededRng fold_rng = rng.substream(kCvFoldTag);
  const std::vector<int> order = fold_rng.shuffled_indices(n);
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    fold[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i % folds;
  }
  return fold;
}

BootstrapScorePair bootstrap_score_both(const DataMatrix& data, const MethodSpec& spec, int b,
                                        double alpha, const SeededRng& rng, int workers) {
  if (b < 2) throw InvalidConfiguration("bootstrap needs b >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfiguration("alpha must lie in (0, 1)");
  const int n = data.n();
  const std::uint64_t key = stream_key(spec.id());

  std::vector<double> hard(static_cast<std::size_t>(b), kNan);
  std::vector<double> smooth(static_cast<std::size_t>(b), kNan);
  parallel_for(static_cast<std::size_t>(b), workers, [&](std::size_t rep) {
    const std::vector<int> rows = bootstrap_indices(n, rng, static_cast<int>(rep));
    const DataMatrix resample = data.take_rows(rows);
    SeededRng fit_rng = rng.substream(kBootFitTag, static_cast<std::uint64_t>(rep), key);
    try {
      const FitResult f = fit(resample, spec, fit_rng);
      const GaussianEvaluation eval = evaluate_scores(data, f.theta);
      hard[rep] = hard_score(eval);
      smooth[rep] = smooth_score(eval);
    } catch (const Error&) {
      // leave NaN: counted as a failure
    }
  });

  int failures = 0;
  for (double s : hard) {
    if (!std::isfinite(s)) ++failures;
  }
  if (4 * failures > b) {
    throw TooManyFailures("more than 25% of bootstrap refits failed");
  }
  BootstrapScorePair out;
  out.hard = bootstrap_summarize(std::move(hard), alpha, n);
  out.smooth = bootstrap_summarize(std::move(smooth), alpha, n);
  return out;
}

BootstrapScore bootstrap_score(const DataMatrix& data, const MethodSpec& spec, ScoreMode mode,
                               int b, double alpha, const SeededRng& rng, int workers) {
  BootstrapScorePair pair = bootstrap_score_both(data, spec, b, alpha, rng, workers);
  return mode == ScoreMode::Hard ? std::move(pair.hard) : std::move(pair.smooth);
}

CvScorePair cv_score_both(const DataMatrix& data, const MethodSpec& spec, int folds, double delta,
                          const SeededRng& rng, int workers) {
  if (folds < 2) throw InvalidConfiguration("cross-validation needs folds >= 2");
  if (delta < 0.0) throw InvalidConfiguration("delta must be >= 0");
  const int n = data.n();
  if (folds > n) throw FoldTooSmall("more folds than points");
  const std::vector<int> fold = cv_fold_ids(n, folds, rng);
  const std::uint64_t key = stream_key(spec.id());

  std::vector<double> hard(static_cast<std::size_t>(folds), kNan);
  std::vector<double> smooth(static_cast<std::size_t>(folds), kNan);
  std::vector<char> too_small(static_cast<std::size_t>(folds), 0);
  parallel_for(static_cast<std::size_t>(folds), workers, [&](std::size_t t) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) {
      (fold[static_cast<std::size_t>(i)] == static_cast<int>(t) ? test : train).push_back(i);
    }
    if (static_cast<int>(train.size()) < spec.k) {
      too_small[t] = 1;
      return;
    }
    if (test.empty()) return;
    SeededRng fit_rng = rng.substream(kCvFitTag, t, key);
    try {
      const DataMatrix train_data = data.take_rows(train);
      const DataMatrix test_data = data.take_rows(test);
      const FitResult f = fit(train_data, spec, fit_rng);
      const GaussianEvaluation eval = evaluate_scores(test_data, f.theta);
      hard[t] = hard_score(eval);
      smooth[t] = smooth_score(eval);
    } catch (const Error&) {
      // leave NaN
    }
  });
  for (char flag : too_small) {
    if (flag) throw FoldTooSmall("training fold smaller than k");
  }

  auto collect = [&](const std::vector<double>& scores) {
    std::vector<double> ok;
    for (double s : scores) {
      if (std::isfinite(s)) ok.push_back(s);
    }
    return ok;
  };
  const std::vector<double> ok_hard = collect(hard);
  const int failures = folds - static_cast<int>(ok_hard.size());
  if (4 * failures > folds) {
    throw TooManyFailures("more than 25% of cross-validation folds failed");
  }
  CvScorePair out;
  out.hard = cv_summarize(ok_hard, delta);
  out.smooth = cv_summarize(collect(smooth), delta);
  return out;
}

CvScore cv_score(const DataMatrix& data, const MethodSpec& spec, ScoreMode mode, int folds,
                 double delta, const SeededRng& rng, int workers) {
  CvScorePair pair = cv_score_both(data, spec, folds, delta, rng, workers);
  return mode == ScoreMode::Hard ? std::move(pair.hard) : std::move(pair.smooth);
}

std::string select(const std::vector<SelectionCandidate>& candidates, SeededRng& rng) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const SelectionCandidate& c : candidates) {
    if (!c.applicable) continue;
    any = true;
    best = std::max(best, c.value);
  }
  if (!any) throw NoApplicableMethod("no applicable method for this criterion");
  std::vector<const SelectionCandidate*> tied;
  for (const SelectionCandidate& c : candidates) {
    if (c.applicable && c.value == best) tied.push_back(&c);
  }
  if (tied.size() == 1) return tied.front()->method_id;
  const auto pick = rng.uniform_int(static_cast<std::uint32_t>(tied.size()));
  return tied[pick]->method_id;
}

}  // namespace qsel
