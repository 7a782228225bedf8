#include "qsel/driver.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

#include "qsel/csv.hpp"
#include "qsel/metrics.hpp"
#include "qsel/parallel.hpp"
#include "qsel/qscore.hpp"
#include "qsel/standardize.hpp"

namespace qsel {

std::uint64_t method_key(const std::string& method_id) { return stream_key(method_id); }

namespace {

bool wants(const ExperimentConfig& config, Criterion c) {
  for (Criterion x : config.criteria) {
    if (x == c) return true;
  }
  return false;
}

Partition labels_to_partition(const std::vector<int>& labels) {
  Partition part;
  part.labels = labels;
  int k = 0;
  for (int v : labels) k = std::max(k, v + 1);
  part.k = k;
  return part;
}

// Everything computed for one method on one data set.
void evaluate_method(const DataMatrix& data, const ExperimentConfig& config,
                     const SeededRng& base_rng, MethodReport& row) {
  const std::uint64_t key = stream_key(row.method_id);
  FitResult full_fit;
  try {
    SeededRng fit_rng = base_rng.substream(TagFit, key);
    full_fit = fit(data, row.spec, fit_rng);
    row.fit_ok = true;
    row.n_params = full_fit.n_params;
    row.converged = full_fit.converged;
  } catch (const Error& e) {
    row.fit_ok = false;
    row.fit_error = e.what();
    return;
  }

  const GaussianEvaluation eval = evaluate_scores(data, full_fit.theta);
  auto set = [&](Criterion c, double v) { row.values[c] = v; };

  if (wants(config, Criterion::QH)) set(Criterion::QH, hard_score(eval));
  if (wants(config, Criterion::QS)) set(Criterion::QS, smooth_score(eval));

  if (wants(config, Criterion::AIC) || wants(config, Criterion::BIC)) {
    try {
      const auto [aic, bic] = aic_bic(full_fit, data.n());
      if (wants(config, Criterion::AIC)) set(Criterion::AIC, aic);
      if (wants(config, Criterion::BIC)) set(Criterion::BIC, bic);
    } catch (const NotApplicable&) {
    }
  }
  if (wants(config, Criterion::ICL)) {
    try {
      set(Criterion::ICL, icl(full_fit, data));
    } catch (const NotApplicable&) {
    }
  }
  if (wants(config, Criterion::CH)) {
    try {
      set(Criterion::CH, calinski_harabasz(data, full_fit.partition));
    } catch (const Error&) {
    }
  }
  if (wants(config, Criterion::ASW)) {
    try {
      set(Criterion::ASW, average_silhouette_width(data, full_fit.partition));
    } catch (const Error&) {
    }
  }
  // The 25% disqualification rule surfaces on stderr only.
  auto note_disqualified = [&](const char* what, const Error& e) {
    std::cerr << "note: " << row.method_id << " disqualified for " << what << ": " << e.what()
              << "\n";
  };
  if (wants(config, Criterion::FW)) {
    try {
      SeededRng fw_rng = base_rng.substream(TagFwIdx);
      set(Criterion::FW, fw_stability(data, row.spec, config.effective_b(), fw_rng));
    } catch (const TooManyFailures& e) {
      note_disqualified("FW", e);
    } catch (const Error&) {
    }
  }
  if (wants(config, Criterion::CVLK)) {
    try {
      SeededRng cv_rng = base_rng.substream(TagCvFolds);
      set(Criterion::CVLK, cvlk(data, row.spec, config.folds, cv_rng));
    } catch (const TooManyFailures& e) {
      note_disqualified("CVLK", e);
    } catch (const Error&) {
    }
  }
  if (wants(config, Criterion::CVQH) || wants(config, Criterion::CVQS)) {
    try {
      SeededRng cv_rng = base_rng.substream(TagCvFolds);
      row.cv = cv_score_both(data, row.spec, config.folds, config.delta, cv_rng);
      if (wants(config, Criterion::CVQH)) set(Criterion::CVQH, row.cv->hard.adjusted);
      if (wants(config, Criterion::CVQS)) set(Criterion::CVQS, row.cv->smooth.adjusted);
    } catch (const TooManyFailures& e) {
      note_disqualified("CVQH/CVQS", e);
    } catch (const Error&) {
    }
  }
  if (wants(config, Criterion::BQH) || wants(config, Criterion::BQS)) {
    try {
      SeededRng boot_rng = base_rng.substream(TagBootIdx);
      row.boot =
          bootstrap_score_both(data, row.spec, config.effective_b(), config.alpha, boot_rng);
      if (wants(config, Criterion::BQH)) set(Criterion::BQH, row.boot->hard.lower);
      if (wants(config, Criterion::BQS)) set(Criterion::BQS, row.boot->smooth.lower);
    } catch (const TooManyFailures& e) {
      note_disqualified("BQH/BQS", e);
    } catch (const Error&) {
    }
  }

  if (data.labels) {
    const Partition truth = labels_to_partition(*data.labels);
    row.ari = adjusted_rand_index(full_fit.partition, truth);
    row.nvic = negative_vic(full_fit.partition, truth);
  }
}

}  // namespace

const MethodReport* SelectionReport::find(const std::string& method_id) const {
  for (const MethodReport& m : methods) {
    if (m.method_id == method_id) return &m;
  }
  return nullptr;
}

std::optional<std::string> SelectionReport::selected_by(Criterion c) const {
  for (const SelectionOutcome& s : selections) {
    if (s.criterion == c) return s.method_id;
  }
  return std::nullopt;
}

SelectionReport run_selection(const DataMatrix& data, const ExperimentConfig& config,
                              std::uint64_t run_seed) {
  SelectionReport report;
  report.methods.resize(config.menu.size());
  for (std::size_t i = 0; i < config.menu.size(); ++i) {
    report.methods[i].spec = config.menu[i];
    report.methods[i].method_id = config.menu[i].id();
  }

  const SeededRng base_rng(run_seed, 0);
  parallel_for(config.menu.size(), config.workers, [&](std::size_t i) {
    evaluate_method(data, config, base_rng, report.methods[i]);
  });

  int disqualified = 0;
  for (const MethodReport& m : report.methods) {
    if (!m.fit_ok) ++disqualified;
  }
  if (disqualified > 0) {
    std::cerr << "note: " << disqualified << " of " << report.methods.size()
              << " menu methods failed to fit and were discarded\n";
  }

  for (Criterion criterion : config.criteria) {
    std::vector<const MethodReport*> applicable;
    double best = -std::numeric_limits<double>::infinity();
    for (const MethodReport& m : report.methods) {
      const auto it = m.values.find(criterion);
      if (it == m.values.end() || !it->second.has_value()) continue;
      applicable.push_back(&m);
      best = std::max(best, *it->second);
    }
    if (applicable.empty()) continue;
    std::vector<const MethodReport*> tied;
    for (const MethodReport* m : applicable) {
      if (*m->values.at(criterion) == best) tied.push_back(m);
    }
    SelectionOutcome outcome;
    outcome.criterion = criterion;
    if (tied.size() == 1) {
      outcome.method_id = tied.front()->method_id;
    } else {
      SeededRng tie_rng =
          base_rng.substream(TagTie, static_cast<std::uint64_t>(criterion));
      outcome.method_id =
          tied[tie_rng.uniform_int(static_cast<std::uint32_t>(tied.size()))]->method_id;
      for (const MethodReport* m : tied) outcome.tied_ids.push_back(m->method_id);
    }
    report.selections.push_back(outcome);
  }
  for (const SelectionOutcome& outcome : report.selections) {
    for (MethodReport& m : report.methods) {
      if (m.method_id == outcome.method_id) m.selected_by.insert(outcome.criterion);
    }
  }
  return report;
}

namespace {

DataMatrix load_experiment_data(const ExperimentConfig& config, std::uint64_t run_seed,
                                int replicate) {
  DataMatrix data;
  if (config.csv) {
    data = load_csv(config.csv->path, config.csv->label_column);
  } else {
    SeededRng rng(config.seed, derive_stream(TagData, static_cast<std::uint64_t>(replicate), 1));
    data = sample(config.simulated->dgp, rng);
  }
  (void)run_seed;
  if (config.standardize) data = standardize(data).data;
  return data;
}

}  // namespace

SelectionReport cmd_select(const ExperimentConfig& config) {
  const DataMatrix data = load_experiment_data(config, config.seed, 0);
  SelectionReport report = run_selection(data, config, config.seed);
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  write_report_csv(report, config, config.out_dir + "/report.csv");
  write_report_json(report, config, config.out_dir + "/report.json");
  write_method_curves(report, config.out_dir + "/curves");
  return report;
}

McReport cmd_simulate(const ExperimentConfig& config) {
  if (!config.simulated) throw ConfigError("simulate requires a 'design' data source");
  const int reps = config.simulated->monte_carlo_reps;
  McReport mc;

  std::vector<SelectionReport> reports(static_cast<std::size_t>(reps));
  for (int rep = 0; rep < reps; ++rep) {
    const DataMatrix data = load_experiment_data(config, config.seed, rep);
    const std::uint64_t run_seed = derive_stream(TagData, config.seed, static_cast<std::uint64_t>(rep));
    reports[static_cast<std::size_t>(rep)] = run_selection(data, config, run_seed);
    std::cerr << "replicate " << (rep + 1) << "/" << reps << " done\n";
  }

  for (int rep = 0; rep < reps; ++rep) {
    const SelectionReport& report = reports[static_cast<std::size_t>(rep)];
    for (const SelectionOutcome& outcome : report.selections) {
      const MethodReport* m = report.find(outcome.method_id);
      if (!m) continue;
      McReplicateRow row;
      row.replicate = rep;
      row.criterion = outcome.criterion;
      row.method_id = outcome.method_id;
      row.k = m->spec.k;
      row.ari = m->ari.value_or(0.0);
      row.nvic = m->nvic.value_or(0.0);
      mc.replicates.push_back(row);
    }
  }

  for (Criterion criterion : config.criteria) {
    std::vector<const McReplicateRow*> rows;
    for (const McReplicateRow& r : mc.replicates) {
      if (r.criterion == criterion) rows.push_back(&r);
    }
    if (rows.empty()) continue;
    McAggregateRow agg;
    agg.criterion = criterion;
    agg.valid_reps = static_cast<int>(rows.size());
    std::map<int, int> k_counts;
    for (const McReplicateRow* r : rows) k_counts[r->k]++;
    int best_count = -1;
    for (const auto& [k, count] : k_counts) {
      if (count > best_count) {  // map order breaks ties toward the smaller K
        best_count = count;
        agg.modal_k = k;
      }
    }
    agg.modal_frequency = static_cast<double>(best_count) / static_cast<double>(rows.size());
    double ari_sum = 0.0, nvic_sum = 0.0;
    for (const McReplicateRow* r : rows) {
      ari_sum += r->ari;
      nvic_sum += r->nvic;
    }
    agg.ari_mean = ari_sum / rows.size();
    agg.nvic_mean = nvic_sum / rows.size();
    double ari_ss = 0.0, nvic_ss = 0.0;
    for (const McReplicateRow* r : rows) {
      ari_ss += (r->ari - agg.ari_mean) * (r->ari - agg.ari_mean);
      nvic_ss += (r->nvic - agg.nvic_mean) * (r->nvic - agg.nvic_mean);
    }
    if (rows.size() > 1) {
      agg.ari_sd = std::sqrt(ari_ss / (rows.size() - 1.0));
      agg.nvic_sd = std::sqrt(nvic_ss / (rows.size() - 1.0));
    }
    mc.aggregate.push_back(agg);
  }

  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  write_mc_report(mc, config, config.out_dir);
  return mc;
}

PopulationCurveOutcome cmd_population_curve(const PopulationCurveArgs& args) {
  if (args.d_min > args.d_max) throw ConfigError("empty separation range (d_min > d_max)");
  if (args.step <= 0.0) throw ConfigError("step must be positive");
  std::vector<double> grid;
  for (double d = args.d_min; d <= args.d_max + 1e-12; d += args.step) grid.push_back(d);

  const SeededRng rng(args.seed, 0);
  PopulationCurveOutcome out;
  out.result =
      population_score_curve(args.design, grid, args.draws, args.repeats, rng, args.workers);
  out.hard_crossing = locate_crossing(grid, out.result.h_k1, out.result.h_k2);
  out.smooth_crossing = locate_crossing(grid, out.result.t_k1, out.result.t_k2);
  write_population_curve_csv(out.result, args.out_path);
  return out;
}

}  // namespace qsel
