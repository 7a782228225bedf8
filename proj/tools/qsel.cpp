// Command-line front end: menu selection experiments on CSV or simulated
// data, Monte Carlo aggregation, population score curves, and partition
// agreement metrics.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsel/csv.hpp"
#include "qsel/driver.hpp"
#include "qsel/error.hpp"
#include "qsel/metrics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitCompute = 4;

struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<int> b;
  std::optional<double> alpha;
  std::optional<int> folds;
  std::optional<double> delta;
  bool verbose = false;
};

qsel::ExperimentConfig load_with_overrides(const std::string& config_path,
                                           const CommonOverrides& o) {
  qsel::ExperimentConfig config = qsel::load_config(config_path);
  if (o.seed) config.seed = *o.seed;
  if (o.workers) config.workers = *o.workers;
  if (o.out) config.out_dir = *o.out;
  if (o.b) config.b = *o.b;
  if (o.alpha) config.alpha = *o.alpha;
  if (o.folds) config.folds = *o.folds;
  if (o.delta) config.delta = *o.delta;
  if (o.verbose) config.verbose = true;
  return config;
}

std::vector<int> read_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qsel::ParseError("cannot open label file: " + path);
  std::map<std::string, int> ids;
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    auto [it, inserted] = ids.emplace(line, static_cast<int>(ids.size()));
    labels.push_back(it->second);
  }
  if (labels.empty()) throw qsel::EmptyData("label file is empty: " + path);
  return labels;
}

qsel::Partition to_partition(const std::vector<int>& labels) {
  qsel::Partition part;
  part.labels = labels;
  int k = 0;
  for (int v : labels) k = std::max(k, v + 1);
  part.k = k;
  return part;
}

void add_common(CLI::App* cmd, std::string& config_path, CommonOverrides& o) {
  cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
  cmd->add_option("--seed", o.seed, "override the config seed");
  cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--b", o.b, "bootstrap replicates");
  cmd->add_option("--alpha", o.alpha, "confidence level complement");
  cmd->add_option("--folds", o.folds, "cross-validation folds");
  cmd->add_option("--delta", o.delta, "cross-validation adjustment multiplier");
  cmd->add_flag("--verbose", o.verbose, "include replicate arrays in report.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadratic-score cluster selection"};
  app.require_subcommand(1);

  std::string config_path;
  CommonOverrides overrides;

  CLI::App* select_cmd = app.add_subcommand("select", "fit a method menu and select solutions");
  add_common(select_cmd, config_path, overrides);

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo selection over a simulated design");
  add_common(simulate_cmd, config_path, overrides);

  CLI::App* curve_cmd =
      app.add_subcommand("population-curve", "population score curves over a separation grid");
  std::string design_name = "dgpG";
  qsel::PopulationCurveArgs curve_args;
  bool have_curve_seed = false;
  curve_cmd->add_option("--design", design_name, "dgpG or dgpU");
  curve_cmd->add_option("--d-min", curve_args.d_min, "grid start");
  curve_cmd->add_option("--d-max", curve_args.d_max, "grid end");
  curve_cmd->add_option("--step", curve_args.step, "grid step");
  curve_cmd->add_option("--draws", curve_args.draws, "Monte Carlo draws per repeat");
  curve_cmd->add_option("--repeats", curve_args.repeats, "independent repeats per grid point");
  curve_cmd->add_option("--seed", curve_args.seed, "random seed")
      ->each([&](const std::string&) { have_curve_seed = true; });
  curve_cmd->add_option("--out", curve_args.out_path, "output CSV path");
  curve_cmd->add_option("--workers", curve_args.workers, "worker threads (0 = all cores)");

  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "ARI and negative VIC between two label files");
  std::string labels_a, labels_b;
  metrics_cmd->add_option("labels_a", labels_a, "first label file")->required();
  metrics_cmd->add_option("labels_b", labels_b, "second label file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (select_cmd->parsed()) {
      const qsel::ExperimentConfig config = load_with_overrides(config_path, overrides);
      const qsel::SelectionReport report = qsel::cmd_select(config);
      for (const qsel::SelectionOutcome& s : report.selections) {
        const qsel::MethodReport* m = report.find(s.method_id);
        std::cout << qsel::to_string(s.criterion) << ": " << s.method_id;
        if (m && m->ari) std::cout << " ari=" << *m->ari;
        if (m && m->nvic) std::cout << " nvic=" << *m->nvic;
        std::cout << '\n';
      }
    } else if (simulate_cmd->parsed()) {
      const qsel::ExperimentConfig config = load_with_overrides(config_path, overrides);
      const qsel::McReport report = qsel::cmd_simulate(config);
      for (const qsel::McAggregateRow& row : report.aggregate) {
        std::cout << qsel::to_string(row.criterion) << ": modal_k=" << row.modal_k << " ("
                  << 100.0 * row.modal_frequency << "%) ari=" << row.ari_mean << " ("
                  << row.ari_sd << ") nvic=" << row.nvic_mean << " (" << row.nvic_sd << ")\n";
      }
    } else if (curve_cmd->parsed()) {
      if (!have_curve_seed) throw qsel::ConfigError("population-curve requires --seed");
      curve_args.design = qsel::design_from_string(design_name);
      const qsel::PopulationCurveOutcome out = qsel::cmd_population_curve(curve_args);
      if (out.hard_crossing) {
        std::cout << "hard crossing: d=" << *out.hard_crossing << '\n';
      } else {
        std::cout << "hard crossing: none in range\n";
      }
      if (out.smooth_crossing) {
        std::cout << "smooth crossing: d=" << *out.smooth_crossing << '\n';
      } else {
        std::cout << "smooth crossing: none in range\n";
      }
    } else if (metrics_cmd->parsed()) {
      const qsel::Partition a = to_partition(read_label_file(labels_a));
      const qsel::Partition b = to_partition(read_label_file(labels_b));
      std::cout << "ari=" << qsel::adjusted_rand_index(a, b)
                << " nvic=" << qsel::negative_vic(a, b) << '\n';
    }
  } catch (const qsel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qsel::ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const qsel::EmptyData& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const qsel::Error& e) {
    std::cerr << "compute error: " << e.what() << '\n';
    return kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCompute;
  }
  return kExitOk;
}
