#pragma once

#include <optional>
#include <string>
#include <utility>

#include "qsel/backends.hpp"
#include "qsel/rng.hpp"
#include "qsel/types.hpp"

namespace qsel {

enum class Criterion { AIC, BIC, ICL, CH, ASW, FW, CVLK, QH, QS, CVQH, CVQS, BQH, BQS };

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

/// One criterion value for one method, maximization oriented; absent valueise
/// means the criterion is not applicable (or was disqualified).
struct CriterionValue {
  std::string method_id;
  Criterion criterion = Criterion::BQS;
  std::optional<double> value;

  bool applicable() const { return value.has_value(); }
};

/// AIC = 2 loglik - 2 nu and BIC = 2 loglik - log(n) nu.
/// Throws NotApplicable for non-likelihood backends.
std::pair<double, double> aic_bic(const FitResult& fit, int n);

/// ICL = 2 E[clik | X_n] - log(n) nu; agrees with BIC minus twice the
/// summed MAP-assignment entropy.
double icl(const FitResult& fit, const DataMatrix& data);

/// Calinski-Harabasz ratio with squared Euclidean dissimilarity.
/// Throws NotApplicable for K=1 and DegenerateScatter when W = 0.
double calinski_harabasz(const DataMatrix& data, const Partition& partition);

/// Average silhouette width with Euclidean dissimilarity; singleton
/// clusters contribute s(i) = 0. Throws NotApplicable for K=1.
double average_silhouette_width(const DataMatrix& data, const Partition& partition);

/// Negated mean co-assignment mismatch over b independent bootstrap pairs;
/// in [-1, 0]. Throws NotApplicable for K=1 and TooManyFailures when more
/// than 25% of the pair fits fail.
double fw_stability(const DataMatrix& data, const MethodSpec& spec, int b, SeededRng& rng);

/// Mismatch rate of the co-assignment indicators of two label vectors over
/// the same points (step 3 of the stability criterion).
double pair_mismatch_rate(const std::vector<int>& a, const std::vector<int>& b);

/// Cross-validated held-out mixture log-likelihood, averaged over folds.
/// GaussianEM only.
double cvlk(const DataMatrix& data, const MethodSpec& spec, int folds, SeededRng& rng);

}  // namespace qsel
