#include <cmath>
#include <limits>

#include "internal.hpp"
#include "qsel/qscore.hpp"

namespace qsel::detail {

namespace {

struct EmRun {
  ClusterConfiguration theta;
  Partition partition;
  double loglik = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

// Model-constrained covariance update from the soft scatter matrices.
std::vector<Eigen::MatrixXd> apply_model(CovarianceModel model,
                                         const std::vector<Eigen::MatrixXd>& s,
                                         const Eigen::VectorXd& nk, double n, int p) {
  const int K = static_cast<int>(s.size());
  std::vector<Eigen::MatrixXd> out(s.size());
  switch (model) {
    case CovarianceModel::VVV:
      out = s;
      break;
    case CovarianceModel::EEE: {
      Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(p, p);
      for (int k = 0; k < K; ++k) pooled += (nk(k) / n) * s[static_cast<std::size_t>(k)];
      for (int k = 0; k < K; ++k) out[static_cast<std::size_t>(k)] = pooled;
      break;
    }
    case CovarianceModel::VVI:
      for (int k = 0; k < K; ++k) {
        out[static_cast<std::size_t>(k)] =
            s[static_cast<std::size_t>(k)].diagonal().asDiagonal();
      }
      break;
    case CovarianceModel::EEI: {
      Eigen::VectorXd pooled = Eigen::VectorXd::Zero(p);
      for (int k = 0; k < K; ++k) pooled += (nk(k) / n) * s[static_cast<std::size_t>(k)].diagonal();
      for (int k = 0; k < K; ++k) out[static_cast<std::size_t>(k)] = pooled.asDiagonal();
      break;
    }
    case CovarianceModel::VII:
      for (int k = 0; k < K; ++k) {
        const double lambda = s[static_cast<std::size_t>(k)].trace() / p;
        out[static_cast<std::size_t>(k)] = lambda * Eigen::MatrixXd::Identity(p, p);
      }
      break;
    case CovarianceModel::EII: {
      double lambda = 0.0;
      for (int k = 0; k < K; ++k) lambda += nk(k) * s[static_cast<std::size_t>(k)].trace();
      lambda /= n * p;
      for (int k = 0; k < K; ++k) {
        out[static_cast<std::size_t>(k)] = lambda * Eigen::MatrixXd::Identity(p, p);
      }
      break;
    }
  }
  return out;
}

EmRun em_single_run(const DataMatrix& data, const MethodSpec& spec, const Partition& init,
                    std::vector<double>* loglik_trace) {
  const int n = data.n();
  const int p = data.p();
  const int K = spec.k;
  const double floor = covariance_floor(data);

  ClusterConfiguration theta;
  theta.triplets.resize(static_cast<std::size_t>(K));
  int last_floored = 0;

  // Model-constrained M-step from soft weights; also used to build a
  // first iterate that lies inside the model family.
  auto m_step = [&](const Eigen::MatrixXd& w, const Eigen::VectorXd& nk) {
    for (int k = 0; k < K; ++k) {
      theta.triplets[static_cast<std::size_t>(k)].pi = nk(k) / n;
    }
    std::vector<Eigen::MatrixXd> scatters(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      const Eigen::VectorXd mu = data.values.transpose() * w.col(k) / nk(k);
      const Eigen::MatrixXd centered = data.values.rowwise() - mu.transpose();
      scatters[static_cast<std::size_t>(k)] =
          centered.transpose() * w.col(k).asDiagonal() * centered / nk(k);
      theta.triplets[static_cast<std::size_t>(k)].mu = mu;
    }
    scatters = apply_model(spec.model, scatters, nk, n, p);
    std::vector<double> weights(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) weights[static_cast<std::size_t>(k)] = nk(k);
    last_floored = regularize_scatters(scatters, weights, floor, spec.gamma);
    for (int k = 0; k < K; ++k) {
      theta.triplets[static_cast<std::size_t>(k)].sigma =
          std::move(scatters[static_cast<std::size_t>(k)]);
    }
  };

  {
    Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(n, K);
    for (int i = 0; i < n; ++i) w0(i, init.labels[static_cast<std::size_t>(i)]) = 1.0;
    m_step(w0, w0.colwise().sum());
  }

  bool repaired = false;
  EmRun run;
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (run.iterations = 1; run.iterations <= spec.max_iter; ++run.iterations) {
    const GaussianEvaluation eval = evaluate_scores(data, theta);
    const double ll = mixture_loglik(eval);
    if (!std::isfinite(ll)) throw DegenerateFit("non-finite mixture log-likelihood");
    if (loglik_trace) loglik_trace->push_back(ll);
    if (std::abs(ll - prev_ll) < spec.tol * (1.0 + std::abs(ll))) {
      run.converged = true;
      run.loglik = ll;
      run.partition = quadratic_partition(eval);
      break;
    }
    prev_ll = ll;
    run.loglik = ll;
    run.partition = quadratic_partition(eval);

    ScoreWeights w = smooth_weights(eval);
    Eigen::VectorXd nk = w.weights.colwise().sum();
    for (int k = 0; k < K; ++k) {
      if (nk(k) < 1e-8) {
        if (repaired) throw DegenerateFit("component emptied twice");
        repaired = true;
        // New singleton seed: the point farthest from its current center.
        const Partition map = quadratic_partition(eval);
        int worst = 0;
        double worst_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const Eigen::VectorXd diff =
              data.values.row(i).transpose() -
              theta.triplets[static_cast<std::size_t>(map.labels[static_cast<std::size_t>(i)])].mu;
          const double d = diff.squaredNorm();
          if (d > worst_d) {
            worst_d = d;
            worst = i;
          }
        }
        w.weights.row(worst).setZero();
        w.weights(worst, k) = 1.0;
        nk = w.weights.colwise().sum();
      }
    }
    m_step(w.weights, nk);
  }
  if (2 * last_floored > K) {
    throw DegenerateFit("covariance floor active in most components");
  }
  run.theta = theta;
  return run;
}

}  // namespace

FitResult fit_gaussian_em(const DataMatrix& data, const MethodSpec& spec, SeededRng& rng,
                          std::vector<double>* loglik_trace) {
  const RowMatrix x = data.values;
  EmRun best;
  bool have_best = false;
  std::string last_error = "no restart attempted";
  for (int r = 0; r < spec.restarts; ++r) {
    SeededRng restart_rng = rng.substream(0x656d, static_cast<std::uint64_t>(r));
    try {
      const Partition init = initial_partition(x, spec.k, spec.init, restart_rng);
      std::vector<double> trace_local;
      EmRun run = em_single_run(data, spec, init,
                                loglik_trace && r == 0 ? loglik_trace : &trace_local);
      if (!have_best || run.loglik > best.loglik) {
        best = std::move(run);
        have_best = true;
      }
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (!have_best) throw DegenerateFit("every EM restart failed: " + last_error);

  FitResult out;
  out.backend = Backend::GaussianEM;
  out.theta = best.theta;
  out.theta.method_id = spec.id();
  out.partition = best.partition;
  out.objective = best.loglik;
  out.n_params = count_free_params(spec.model, spec.k, data.p());
  out.converged = best.converged;
  out.iterations = best.iterations;
  out.centers.resize(spec.k, data.p());
  for (int k = 0; k < spec.k; ++k) {
    out.centers.row(k) = best.theta.triplets[static_cast<std::size_t>(k)].mu.transpose();
  }
  return out;
}

}  // namespace qsel::detail
