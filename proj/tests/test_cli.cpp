#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "qsel/driver.hpp"

using namespace qsel;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string tmp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string small_sim_config(const std::string& out, int workers, std::uint64_t seed = 11,
                             int reps = 1) {
  std::ostringstream cfg;
  cfg << R"({
    "schema_version": 1,
    "seed": )"
      << seed << R"(,
    "data": {"design": "dgpG", "n": 60, "d": 6.0, "monte_carlo_reps": )"
      << reps << R"(},
    "menu": [
      {"backend": "gaussian-em", "k": [1, 3], "models": ["VVV"], "gammas": [100]},
      {"backend": "kmeans", "k": [1, 3], "restarts": 2}
    ],
    "criteria": ["QH", "QS", "BQH", "BQS", "BIC", "ICL", "CH", "ASW", "CVQH", "CVQS"],
    "b": 12,
    "folds": 5,
    "workers": )"
      << workers << R"(,
    "out": ")"
      << out << R"("
  })";
  return cfg.str();
}

}  // namespace

TEST_CASE("parse_config: validation errors name the offending field") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"data": {"csv": "x.csv"}, "menu": [{"backend":"kmeans"}]})"),
                  ConfigError);  // missing seed
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "menu": [{"backend":"kmeans"}]})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(
          R"({"seed": 1, "data": {"csv": "x", "design": "uniform"}, "menu": [{"backend":"kmeans"}]})"),
      ConfigError);  // both sources
  CHECK_THROWS_AS(
      parse_config(R"({"seed": 1, "data": {"csv": "x"}, "menu": []})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(
          R"({"seed": 1, "data": {"csv": "x"}, "menu": [{"backend":"gaussian-em","models":["VEV"]}]})"),
      UnsupportedModel);
  CHECK_THROWS_AS(
      parse_config(
          R"({"seed": 1, "data": {"csv": "x"}, "menu": [{"backend":"kmeans"}], "alpha": 1.5})"),
      ConfigError);
}

TEST_CASE("parse_config: menu expansion order is K-major then complexity") {
  const ExperimentConfig config = parse_config(R"({
    "seed": 3,
    "data": {"design": "uniform", "n": 50},
    "menu": [{"backend": "gaussian-em", "k": [1, 2], "models": ["VVV", "EII"], "gammas": [10, 1]}]
  })");
  REQUIRE(config.menu.size() == 8);
  CHECK(config.menu[0].k == 1);
  CHECK(config.menu[0].model == CovarianceModel::EII);
  CHECK(config.menu[0].gamma == 1.0);
  CHECK(config.menu[1].gamma == 10.0);
  CHECK(config.menu[2].model == CovarianceModel::VVV);
  CHECK(config.menu[4].k == 2);
  // defaults
  CHECK(config.effective_b() == 100);  // simulated source
  CHECK(config.alpha == 0.05);
  CHECK(config.folds == 10);
  CHECK(config.delta == 1.96);
  CHECK(config.criteria.size() == 13);
}

TEST_CASE("config round-trips through the validator") {
  const ExperimentConfig config = parse_config(small_sim_config("/tmp/qsel_rt", 1));
  const ExperimentConfig back = parse_config(config_to_json(config));
  REQUIRE(back.menu.size() == config.menu.size());
  for (std::size_t i = 0; i < config.menu.size(); ++i) {
    CHECK(back.menu[i].id() == config.menu[i].id());
  }
  CHECK(back.seed == config.seed);
  CHECK(back.criteria == config.criteria);
}

TEST_CASE("cmd_select writes deterministic reports; worker count is irrelevant") {
  const std::string out1 = tmp_dir("qsel_sel1");
  const std::string out2 = tmp_dir("qsel_sel2");
  const std::string out3 = tmp_dir("qsel_sel3");

  const SelectionReport r1 = cmd_select(parse_config(small_sim_config(out1, 1)));
  const SelectionReport r2 = cmd_select(parse_config(small_sim_config(out2, 4)));
  const SelectionReport r3 = cmd_select(parse_config(small_sim_config(out3, 1)));

  CHECK(read_file(out1 + "/report.csv") == read_file(out2 + "/report.csv"));
  CHECK(read_file(out1 + "/report.csv") == read_file(out3 + "/report.csv"));

  // a selection exists for every requested criterion that has a candidate
  CHECK(r1.selected_by(Criterion::BQS).has_value());
  CHECK(r1.selected_by(Criterion::QH).has_value());
  REQUIRE(r2.selected_by(Criterion::BQS).has_value());
  CHECK(*r1.selected_by(Criterion::BQS) == *r2.selected_by(Criterion::BQS));

  // with d=6 separation, BQS should pick a K=2 solution
  const MethodReport* winner = r1.find(*r1.selected_by(Criterion::BQS));
  REQUIRE(winner != nullptr);
  CHECK(winner->spec.k == 2);
  CHECK(winner->ari.has_value());
  CHECK(*winner->ari > 0.95);

  // curve files exist for bootstrapped methods
  CHECK(fs::exists(out1 + "/curves/" + winner->method_id + ".csv"));
  // report.json embeds a config that passes the validator
  const std::string json_text = read_file(out1 + "/report.json");
  const auto pos = json_text.find("\"config\"");
  REQUIRE(pos != std::string::npos);
}

TEST_CASE("single-method menu is selected by every applicable criterion") {
  const std::string out = tmp_dir("qsel_single");
  std::ostringstream cfg;
  cfg << R"({
    "seed": 5,
    "data": {"design": "dgpG", "n": 50, "d": 5.0},
    "menu": [{"backend": "gaussian-em", "k": 2, "models": ["VVV"]}],
    "criteria": ["QH", "QS", "AIC", "BIC", "ICL", "CH", "ASW", "BQH", "BQS"],
    "b": 8,
    "out": ")"
      << out << R"("
  })";
  const SelectionReport report = cmd_select(parse_config(cfg.str()));
  const std::string only_id = report.methods.at(0).method_id;
  for (const Criterion c : {Criterion::QH, Criterion::QS, Criterion::AIC, Criterion::BIC,
                            Criterion::ICL, Criterion::CH, Criterion::ASW, Criterion::BQH,
                            Criterion::BQS}) {
    REQUIRE(report.selected_by(c).has_value());
    CHECK(*report.selected_by(c) == only_id);
  }
}

TEST_CASE("cmd_simulate aggregates replicates") {
  const std::string out = tmp_dir("qsel_mc");
  const ExperimentConfig config = parse_config(small_sim_config(out, 2, 19, 3));
  const McReport report = cmd_simulate(config);
  CHECK_FALSE(report.aggregate.empty());
  for (const McAggregateRow& row : report.aggregate) {
    CHECK(row.valid_reps == 3);
    CHECK(row.modal_frequency > 0.0);
    CHECK(row.modal_frequency <= 1.0);
  }
  CHECK(fs::exists(out + "/mc_summary.csv"));
  CHECK(fs::exists(out + "/mc/replicate_0.csv"));
  CHECK(fs::exists(out + "/mc/replicate_2.csv"));

  SUBCASE("reps=1 aggregate equals the replicate row") {
    const std::string out1 = tmp_dir("qsel_mc1");
    const McReport single = cmd_simulate(parse_config(small_sim_config(out1, 1, 19, 1)));
    for (const McAggregateRow& row : single.aggregate) {
      CHECK(row.valid_reps == 1);
      CHECK(row.modal_frequency == 1.0);
      // the aggregate ARI equals the single replicate's ARI
      for (const McReplicateRow& rep : single.replicates) {
        if (rep.criterion == row.criterion) {
          CHECK(row.ari_mean == rep.ari);
          CHECK(row.ari_sd == 0.0);
        }
      }
    }
  }
}

TEST_CASE("ten-dimensional and mixed designs run through selection") {
  for (const std::string design : {std::string("t510d"), std::string("flower2")}) {
    const std::string out = tmp_dir("qsel_smoke_" + design);
    std::ostringstream cfg;
    cfg << R"({"seed": 21, "data": {"design": ")" << design << R"(", "n": 90},
      "menu": [{"backend": "gaussian-em", "k": [1, 3], "models": ["EEI"], "gammas": [100]},
               {"backend": "kmeans", "k": [2, 3]}],
      "criteria": ["QS", "BQS", "ASW"], "b": 8, "out": ")"
        << out << R"("})";
    const SelectionReport report = cmd_select(parse_config(cfg.str()));
    REQUIRE(report.selected_by(Criterion::BQS).has_value());
    const MethodReport* winner = report.find(*report.selected_by(Criterion::BQS));
    REQUIRE(winner != nullptr);
    CHECK(winner->ari.has_value());  // simulated sources carry ground truth
  }
}

TEST_CASE("report.json embeds a config that the validator accepts") {
  const std::string out = tmp_dir("qsel_json_rt");
  cmd_select(parse_config(small_sim_config(out, 1)));
  const std::string text = read_file(out + "/report.json");
  // pull the embedded config back out and revalidate it
  const auto doc = nlohmann::json::parse(text);
  REQUIRE(doc.contains("config"));
  const ExperimentConfig back = parse_config(doc.at("config").dump());
  CHECK(back.seed == 11);
  CHECK_FALSE(back.menu.empty());
}

#ifdef QSEL_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QSEL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("binary exit codes: 0 / 2 / 3") {
  const std::string dir = tmp_dir("qsel_bin");

  SUBCASE("missing csv file exits 3") {
    std::ofstream cfg(dir + "/c.json");
    cfg << R"({"seed":1,"data":{"csv":")" << dir
        << R"(/nope.csv"},"menu":[{"backend":"kmeans","k":2}],"criteria":["QH"],"out":")" << dir
        << R"("})";
    cfg.close();
    CHECK(run_cli("select --config " + dir + "/c.json") == 3);
  }
  SUBCASE("config errors exit 2") {
    std::ofstream cfg(dir + "/bad.json");
    cfg << R"({"data":{"design":"uniform"},"menu":[{"backend":"kmeans","k":2}]})";  // no seed
    cfg.close();
    CHECK(run_cli("select --config " + dir + "/bad.json") == 2);
    CHECK(run_cli("population-curve --design dgpG --d-min 9 --d-max 1 --seed 1") == 2);
  }
  SUBCASE("metrics subcommand") {
    std::ofstream a(dir + "/a.labels"), b(dir + "/b.labels");
    a << "x\nx\ny\ny\n";
    b << "p\np\nq\nq\n";
    a.close();
    b.close();
    CHECK(run_cli("metrics " + dir + "/a.labels " + dir + "/b.labels") == 0);
    CHECK(run_cli("metrics " + dir + "/a.labels " + dir + "/missing.labels") == 3);
  }
  SUBCASE("population-curve smoke run") {
    CHECK(run_cli("population-curve --design dgpU --d-min 2.0 --d-max 3.0 --step 0.5 "
                  "--draws 2000 --repeats 2 --seed 4 --out " +
                  dir + "/curve.csv") == 0);
    CHECK(fs::exists(dir + "/curve.csv"));
  }
  SUBCASE("select end to end with exit 0") {
    std::ofstream cfg(dir + "/ok.json");
    cfg << small_sim_config(dir + "/out", 2, 3, 1);
    cfg.close();
    CHECK(run_cli("select --config " + dir + "/ok.json") == 0);
    CHECK(fs::exists(dir + "/out/report.csv"));
  }
}
#endif

TEST_CASE("cmd_population_curve: small smoke run with crossing detection") {
  const std::string out = tmp_dir("qsel_curve");
  PopulationCurveArgs args;
  args.design = Design::DgpG;
  args.d_min = 2.6;
  args.d_max = 3.6;
  args.step = 0.2;
  args.draws = 20000;
  args.repeats = 3;
  args.seed = 9;
  args.out_path = out + "/curve.csv";
  args.workers = 2;
  const PopulationCurveOutcome outcome = cmd_population_curve(args);
  CHECK(fs::exists(args.out_path));
  REQUIRE(outcome.hard_crossing.has_value());
  // coarse grid, small draws: the hard crossing sits near 3.1
  CHECK(*outcome.hard_crossing > 2.7);
  CHECK(*outcome.hard_crossing < 3.5);

  PopulationCurveArgs bad = args;
  bad.d_min = 5.0;
  CHECK_THROWS_AS(cmd_population_curve(bad), ConfigError);
}
