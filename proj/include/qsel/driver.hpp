#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qsel/backends.hpp"
#include "qsel/criteria.hpp"
#include "qsel/dgp.hpp"
#include "qsel/resampling.hpp"
#include "qsel/types.hpp"

namespace qsel {

/// Derivation tags for the per-task RNG streams. Every random decision of
/// an experiment draws from a stream derived from (master seed, tag,
/// coordinates), so results do not depend on scheduling.
enum StreamTag : std::uint64_t {
  TagData = 1,      // DGP sampling for a Monte Carlo replicate
  TagFit = 2,       // full-data fit of a method
  TagBootIdx = 3,   // bootstrap resample indices (method-shared)
  TagBootFit = 4,   // refit on bootstrap replicate (b, method)
  TagCvFolds = 5,   // fold assignment (method-shared)
  TagCvFit = 6,     // per-fold fit (t, method)
  TagFwIdx = 7,     // stability pair resample indices
  TagFwFit = 8,     // stability pair fits
  TagTie = 9,       // tie-breaking draws per criterion
};

/// Stable 64-bit key of a method id used in stream derivation.
std::uint64_t method_key(const std::string& method_id);

struct CsvSource {
  std::string path;
  std::optional<std::string> label_column;
};

struct SimulatedSource {
  DgpSpec dgp;
  int monte_carlo_reps = 1;
};

/// A full experiment description (the JSON config document).
struct ExperimentConfig {
  int schema_version = 1;
  std::uint64_t seed = 0;
  std::optional<CsvSource> csv;
  std::optional<SimulatedSource> simulated;
  bool standardize = false;
  std::vector<MethodSpec> menu;          // expanded, in report order
  std::vector<Criterion> criteria;
  int b = 0;                             // 0 = default for the source kind
  double alpha = 0.05;
  int folds = 10;
  double delta = 1.96;
  std::string out_dir = "out";
  int workers = 0;                       // 0 = all cores
  bool verbose = false;

  int effective_b() const { return b > 0 ? b : (csv ? 1000 : 100); }
};

/// Parses and validates a config document; throws ConfigError with the
/// offending field named.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

/// Everything the selection run produced for one method.
struct MethodReport {
  MethodSpec spec;
  std::string method_id;
  bool fit_ok = false;
  std::string fit_error;
  int n_params = 0;
  bool converged = false;
  std::map<Criterion, std::optional<double>> values;
  std::optional<BootstrapScorePair> boot;
  std::optional<CvScorePair> cv;
  std::optional<double> ari;   // vs ground truth, when labels are present
  std::optional<double> nvic;
  std::set<Criterion> selected_by;
};

struct SelectionOutcome {
  Criterion criterion;
  std::string method_id;                 // winner
  std::vector<std::string> tied_ids;     // recorded when a seeded draw broke a tie
};

struct SelectionReport {
  std::vector<MethodReport> methods;
  std::vector<SelectionOutcome> selections;

  const MethodReport* find(const std::string& method_id) const;
  std::optional<std::string> selected_by(Criterion c) const;
};

/// Runs the full menu x criteria selection on one data set.
SelectionReport run_selection(const DataMatrix& data, const ExperimentConfig& config,
                              std::uint64_t run_seed);

/// Aggregate of a Monte Carlo experiment, one row per criterion.
struct McAggregateRow {
  Criterion criterion;
  int modal_k = 0;
  double modal_frequency = 0.0;
  double ari_mean = 0.0, ari_sd = 0.0;
  double nvic_mean = 0.0, nvic_sd = 0.0;
  int valid_reps = 0;
};

struct McReplicateRow {
  int replicate = 0;
  Criterion criterion;
  std::string method_id;
  int k = 0;
  double ari = 0.0;
  double nvic = 0.0;
};

struct McReport {
  std::vector<McReplicateRow> replicates;
  std::vector<McAggregateRow> aggregate;
};

/// select subcommand: fit, score, select, and write report files.
SelectionReport cmd_select(const ExperimentConfig& config);

/// simulate subcommand: repeated sample -> select with aggregation.
McReport cmd_simulate(const ExperimentConfig& config);

/// population-curve subcommand.
struct PopulationCurveArgs {
  Design design = Design::DgpG;
  double d_min = 2.5, d_max = 4.0, step = 0.01;
  int draws = 100000, repeats = 10;
  std::uint64_t seed = 0;
  std::string out_path = "population_curve.csv";
  int workers = 0;
};
struct PopulationCurveOutcome {
  PopulationScoreResult result;
  std::optional<double> hard_crossing;
  std::optional<double> smooth_crossing;
};
PopulationCurveOutcome cmd_population_curve(const PopulationCurveArgs& args);

/// Serialization of the selection report.
void write_report_csv(const SelectionReport& report, const ExperimentConfig& config,
                      const std::string& path);
void write_report_json(const SelectionReport& report, const ExperimentConfig& config,
                       const std::string& path);
void write_method_curves(const SelectionReport& report, const std::string& dir);
void write_mc_report(const McReport& report, const ExperimentConfig& config,
                     const std::string& dir);

}  // namespace qsel
