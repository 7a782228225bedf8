#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "qsel/driver.hpp"

namespace qsel {

using nlohmann::json;

namespace {

int model_complexity(CovarianceModel m) {
  switch (m) {
    case CovarianceModel::EII: return 0;
    case CovarianceModel::VII: return 1;
    case CovarianceModel::EEI: return 2;
    case CovarianceModel::VVI: return 3;
    case CovarianceModel::EEE: return 4;
    case CovarianceModel::VVV: return 5;
  }
  return 6;
}

double parse_gamma(const json& g) {
  if (g.is_string()) {
    const std::string s = g.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") return kGammaUnbounded;
    throw ConfigError("menu.gammas: unknown value '" + s + "'");
  }
  if (!g.is_number()) throw ConfigError("menu.gammas entries must be numbers or \"inf\"");
  const double v = g.get<double>();
  if (v < 1.0) throw ConfigError("menu.gammas entries must be >= 1");
  return v;
}

std::vector<MethodSpec> expand_menu_group(const json& group) {
  if (!group.contains("backend")) throw ConfigError("menu entry missing 'backend'");
  const Backend backend = backend_from_string(group.at("backend").get<std::string>());

  int k_lo = 1, k_hi = 1;
  if (group.contains("k")) {
    const json& k = group.at("k");
    if (k.is_number_integer()) {
      k_lo = k_hi = k.get<int>();
    } else if (k.is_array() && k.size() == 2) {
      k_lo = k[0].get<int>();
      k_hi = k[1].get<int>();
    } else {
      throw ConfigError("menu.k must be an integer or [lo, hi]");
    }
  }
  if (k_lo < 1 || k_hi < k_lo) throw ConfigError("menu.k range is invalid");

  std::vector<CovarianceModel> models;
  if (group.contains("models")) {
    for (const json& m : group.at("models")) {
      models.push_back(covariance_model_from_string(m.get<std::string>()));
    }
  } else {
    models.push_back(CovarianceModel::VVV);
  }
  std::sort(models.begin(), models.end(), [](CovarianceModel a, CovarianceModel b) {
    return model_complexity(a) < model_complexity(b);
  });

  std::vector<double> gammas;
  if (group.contains("gammas")) {
    for (const json& g : group.at("gammas")) gammas.push_back(parse_gamma(g));
  } else if (group.contains("gamma")) {
    gammas.push_back(parse_gamma(group.at("gamma")));
  } else {
    gammas.push_back(kGammaUnbounded);
  }
  std::sort(gammas.begin(), gammas.end());

  MethodSpec base;
  base.backend = backend;
  base.init = backend == Backend::KMedoids ? InitMethod::PamBuild : InitMethod::KMeansPlusPlus;
  if (group.contains("init")) base.init = init_from_string(group.at("init").get<std::string>());
  if (group.contains("restarts")) base.restarts = group.at("restarts").get<int>();
  if (group.contains("max_iter")) base.max_iter = group.at("max_iter").get<int>();
  if (group.contains("tol")) base.tol = group.at("tol").get<double>();
  if (base.restarts < 1) throw ConfigError("menu.restarts must be >= 1");

  // Axis order of the reports: increasing K, then increasing complexity.
  std::vector<MethodSpec> out;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (backend == Backend::GaussianEM) {
      for (const CovarianceModel model : models) {
        for (const double gamma : gammas) {
          MethodSpec spec = base;
          spec.k = k;
          spec.model = model;
          spec.gamma = gamma;
          out.push_back(spec);
        }
      }
    } else {
      MethodSpec spec = base;
      spec.k = k;
      out.push_back(spec);
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig config;
  try {
    config.schema_version = doc.value("schema_version", 1);
    if (config.schema_version != 1) throw ConfigError("unsupported schema_version");
    if (!doc.contains("seed")) throw ConfigError("config requires an explicit 'seed'");
    config.seed = doc.at("seed").get<std::uint64_t>();

    if (!doc.contains("data")) throw ConfigError("config requires a 'data' source");
    const json& data = doc.at("data");
    if (data.contains("csv")) {
      CsvSource src;
      src.path = data.at("csv").get<std::string>();
      if (data.contains("label_column")) {
        src.label_column = data.at("label_column").get<std::string>();
      }
      config.csv = src;
    }
    if (data.contains("design")) {
      SimulatedSource src;
      src.dgp.design = design_from_string(data.at("design").get<std::string>());
      src.dgp.n = data.value("n", 300);
      src.dgp.d = data.value("d", 0.0);
      src.monte_carlo_reps = data.value("monte_carlo_reps", 1);
      if (src.dgp.n < 1) throw ConfigError("data.n must be >= 1");
      if (src.monte_carlo_reps < 1) throw ConfigError("data.monte_carlo_reps must be >= 1");
      config.simulated = src;
    }
    if (config.csv.has_value() == config.simulated.has_value()) {
      throw ConfigError("data must name exactly one of 'csv' or 'design'");
    }

    config.standardize = doc.value("standardize", false);

    if (!doc.contains("menu") || !doc.at("menu").is_array() || doc.at("menu").empty()) {
      throw ConfigError("config requires a non-empty 'menu'");
    }
    for (const json& group : doc.at("menu")) {
      const std::vector<MethodSpec> specs = expand_menu_group(group);
      config.menu.insert(config.menu.end(), specs.begin(), specs.end());
    }
    {
      std::vector<std::string> ids;
      for (const MethodSpec& m : config.menu) ids.push_back(m.id());
      std::sort(ids.begin(), ids.end());
      if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw ConfigError("menu expands to duplicate method ids");
      }
    }

    if (doc.contains("criteria")) {
      for (const json& c : doc.at("criteria")) {
        config.criteria.push_back(criterion_from_string(c.get<std::string>()));
      }
      if (config.criteria.empty()) throw ConfigError("criteria list must be non-empty");
    } else {
      for (int c = 0; c <= static_cast<int>(Criterion::BQS); ++c) {
        config.criteria.push_back(static_cast<Criterion>(c));
      }
    }

    config.b = doc.value("b", 0);
    config.alpha = doc.value("alpha", 0.05);
    config.folds = doc.value("folds", 10);
    config.delta = doc.value("delta", 1.96);
    config.out_dir = doc.value("out", std::string("out"));
    config.workers = doc.value("workers", 0);
    config.verbose = doc.value("verbose", false);
    if (config.b != 0 && config.b < 2) throw ConfigError("b must be >= 2");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (config.folds < 2) throw ConfigError("folds must be >= 2");
    if (config.delta < 0.0) throw ConfigError("delta must be >= 0");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["schema_version"] = config.schema_version;
  doc["seed"] = config.seed;
  json data;
  if (config.csv) {
    data["csv"] = config.csv->path;
    if (config.csv->label_column) data["label_column"] = *config.csv->label_column;
  } else if (config.simulated) {
    data["design"] = to_string(config.simulated->dgp.design);
    data["n"] = config.simulated->dgp.n;
    data["d"] = config.simulated->dgp.d;
    data["monte_carlo_reps"] = config.simulated->monte_carlo_reps;
  }
  doc["data"] = data;
  doc["standardize"] = config.standardize;
  json menu = json::array();
  for (const MethodSpec& m : config.menu) {
    json g;
    g["backend"] = to_string(m.backend);
    g["k"] = m.k;
    if (m.backend == Backend::GaussianEM) {
      g["models"] = json::array({to_string(m.model)});
      g["gammas"] = json::array();
      if (std::isinf(m.gamma)) {
        g["gammas"].push_back("inf");
      } else {
        g["gammas"].push_back(m.gamma);
      }
    }
    g["init"] = to_string(m.init);
    g["restarts"] = m.restarts;
    g["max_iter"] = m.max_iter;
    g["tol"] = m.tol;
    menu.push_back(g);
  }
  doc["menu"] = menu;
  json criteria = json::array();
  for (Criterion c : config.criteria) criteria.push_back(to_string(c));
  doc["criteria"] = criteria;
  doc["b"] = config.effective_b();
  doc["alpha"] = config.alpha;
  doc["folds"] = config.folds;
  doc["delta"] = config.delta;
  doc["out"] = config.out_dir;
  doc["workers"] = config.workers;
  doc["verbose"] = config.verbose;
  return doc.dump(2);
}

}  // namespace qsel
