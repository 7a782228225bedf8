#pragma once

#include <string>
#include <vector>

#include "qsel/backends.hpp"
#include "qsel/qscore.hpp"
#include "qsel/rng.hpp"
#include "qsel/types.hpp"

namespace qsel {

/// Bootstrap estimate of the expected score with percentile bounds, all on
/// the score scale. Failed refits are NaN entries of replicate_scores.
struct BootstrapScore {
  std::vector<double> replicate_scores;  // length B
  double w_tilde = 0.0;                  // mean of the successful replicates
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.05;
  int failures = 0;
};

/// k-fold cross-validated score with the delta-standard-error adjustment.
struct CvScore {
  std::vector<double> fold_scores;
  double mean = 0.0;
  double sd = 0.0;
  double adjusted = 0.0;
  double delta = 0.0;
};

/// Left-continuous empirical quantile inf{t : F_hat(t) >= a}.
double empirical_quantile(std::vector<double> sorted_or_not, double a);

/// Aggregation step of the bootstrap: mean, root-n centered quantiles,
/// and bounds mapped back to the score scale. NaN entries count as failures.
BootstrapScore bootstrap_summarize(std::vector<double> replicate_scores, double alpha, int n);

/// Aggregation step of the cross-validation: mean, standard deviation over
/// k-1, and the mean minus delta sd/sqrt(k) adjustment.
CvScore cv_summarize(std::vector<double> fold_scores, double delta);

/// Resample indices for replicate b; derived from the stream only, so every
/// method of a menu sees the same resamples.
std::vector<int> bootstrap_indices(int n, const SeededRng& rng, int replicate);

/// Fold ids (0..folds-1) per point; derived from the stream only, so every
/// method of a menu sees identical folds.
std::vector<int> cv_fold_ids(int n, int folds, const SeededRng& rng);

/// Bootstrap scoring of one method: refit on each resample, score the
/// original sample, summarize. Computes the hard and smooth variants from
/// the same refits. Throws TooManyFailures past the 25% rule.
struct BootstrapScorePair {
  BootstrapScore hard;
  BootstrapScore smooth;
};
BootstrapScorePair bootstrap_score_both(const DataMatrix& data, const MethodSpec& spec, int b,
                                        double alpha, const SeededRng& rng, int workers = 1);
BootstrapScore bootstrap_score(const DataMatrix& data, const MethodSpec& spec, ScoreMode mode,
                               int b, double alpha, const SeededRng& rng, int workers = 1);

/// Cross-validated scoring of one method (both score variants share fits).
struct CvScorePair {
  CvScore hard;
  CvScore smooth;
};
CvScorePair cv_score_both(const DataMatrix& data, const MethodSpec& spec, int folds, double delta,
                          const SeededRng& rng, int workers = 1);
CvScore cv_score(const DataMatrix& data, const MethodSpec& spec, ScoreMode mode, int folds,
                 double delta, const SeededRng& rng, int workers = 1);

/// Argmax over applicable methods; exact ties are resolved by a seeded
/// uniform draw among the tied set. Values are (method_id, value-or-nan);
/// entries without a value are skipped. Throws NoApplicableMethod.
struct SelectionCandidate {
  std::string method_id;
  bool applicable = false;
  double value = 0.0;
};
std::string select(const std::vector<SelectionCandidate>& candidates, SeededRng& rng);

}  // namespace qsel
