#include <cmath>
#include <filesystem>
#include <fstream>

#include "nlohmann/json.hpp"
#include "qsel/csv.hpp"
#include "qsel/driver.hpp"

namespace qsel {

using nlohmann::json;

namespace {

const Criterion kAllCriteria[] = {
    Criterion::AIC, Criterion::BIC,  Criterion::ICL,  Criterion::CH,  Criterion::ASW,
    Criterion::FW,  Criterion::CVLK, Criterion::QH,   Criterion::QS,  Criterion::CVQH,
    Criterion::CVQS, Criterion::BQH, Criterion::BQS,
};

std::string cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string optional_value(const MethodReport& m, Criterion c) {
  const auto it = m.values.find(c);
  if (it == m.values.end()) return {};
  return cell(it->second);
}

std::string gamma_text(const MethodSpec& spec) {
  if (spec.backend != Backend::GaussianEM) return {};
  if (std::isinf(spec.gamma)) return "inf";
  return format_double(spec.gamma);
}

}  // namespace

void write_report_csv(const SelectionReport& report, const ExperimentConfig& config,
                      const std::string& path) {
  (void)config;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "method_id,backend,model,gamma,init,k,fit_ok,converged,n_params";
  for (Criterion c : kAllCriteria) out << ',' << to_string(c);
  out << ",bqh_w,bqh_lower,bqh_upper,bqs_w,bqs_lower,bqs_upper"
      << ",cvqh_mean,cvqh_sd,cvqs_mean,cvqs_sd,ari,nvic,selected_by\n";
  for (const MethodReport& m : report.methods) {
    out << m.method_id << ',' << to_string(m.spec.backend) << ','
        << (m.spec.backend == Backend::GaussianEM ? to_string(m.spec.model) : std::string())
        << ',' << gamma_text(m.spec) << ',' << to_string(m.spec.init) << ',' << m.spec.k << ','
        << (m.fit_ok ? 1 : 0) << ',' << (m.converged ? 1 : 0) << ',' << m.n_params;
    for (Criterion c : kAllCriteria) out << ',' << optional_value(m, c);
    if (m.boot) {
      out << ',' << format_double(m.boot->hard.w_tilde) << ','
          << format_double(m.boot->hard.lower) << ',' << format_double(m.boot->hard.upper) << ','
          << format_double(m.boot->smooth.w_tilde) << ',' << format_double(m.boot->smooth.lower)
          << ',' << format_double(m.boot->smooth.upper);
    } else {
      out << ",,,,,,";
    }
    if (m.cv) {
      out << ',' << format_double(m.cv->hard.mean) << ',' << format_double(m.cv->hard.sd) << ','
          << format_double(m.cv->smooth.mean) << ',' << format_double(m.cv->smooth.sd);
    } else {
      out << ",,,,";
    }
    out << ',' << cell(m.ari) << ',' << cell(m.nvic) << ',';
    bool first = true;
    for (Criterion c : m.selected_by) {
      if (!first) out << ';';
      out << to_string(c);
      first = false;
    }
    out << '\n';
  }
}

void write_report_json(const SelectionReport& report, const ExperimentConfig& config,
                       const std::string& path) {
  json doc;
  doc["config"] = json::parse(config_to_json(config));
  json methods = json::array();
  for (const MethodReport& m : report.methods) {
    json row;
    row["method_id"] = m.method_id;
    row["backend"] = to_string(m.spec.backend);
    row["k"] = m.spec.k;
    if (m.spec.backend == Backend::GaussianEM) {
      row["model"] = to_string(m.spec.model);
      row["gamma"] = std::isinf(m.spec.gamma) ? json("inf") : json(m.spec.gamma);
    }
    row["fit_ok"] = m.fit_ok;
    if (!m.fit_ok) row["fit_error"] = m.fit_error;
    row["converged"] = m.converged;
    row["n_params"] = m.n_params;
    json values;
    for (const auto& [criterion, value] : m.values) {
      if (value) values[to_string(criterion)] = *value;
    }
    row["values"] = values;
    if (m.boot) {
      json boot;
      boot["hard"] = {{"w", m.boot->hard.w_tilde},
                      {"lower", m.boot->hard.lower},
                      {"upper", m.boot->hard.upper},
                      {"failures", m.boot->hard.failures}};
      boot["smooth"] = {{"w", m.boot->smooth.w_tilde},
                        {"lower", m.boot->smooth.lower},
                        {"upper", m.boot->smooth.upper},
                        {"failures", m.boot->smooth.failures}};
      if (config.verbose) {
        json reps = json::array();
        for (std::size_t i = 0; i < m.boot->hard.replicate_scores.size(); ++i) {
          const double h = m.boot->hard.replicate_scores[i];
          const double s = m.boot->smooth.replicate_scores[i];
          json rep;
          rep["b"] = i;
          rep["hard"] = std::isfinite(h) ? json(h) : json();
          rep["smooth"] = std::isfinite(s) ? json(s) : json();
          reps.push_back(rep);
        }
        boot["replicates"] = reps;
      }
      row["bootstrap"] = boot;
    }
    if (m.ari) row["ari"] = *m.ari;
    if (m.nvic) row["nvic"] = *m.nvic;
    json selected = json::array();
    for (Criterion c : m.selected_by) selected.push_back(to_string(c));
    row["selected_by"] = selected;
    methods.push_back(row);
  }
  doc["methods"] = methods;
  json selections = json::array();
  for (const SelectionOutcome& s : report.selections) {
    json row;
    row["criterion"] = to_string(s.criterion);
    row["method_id"] = s.method_id;
    if (!s.tied_ids.empty()) row["tied_ids"] = s.tied_ids;
    selections.push_back(row);
  }
  doc["selections"] = selections;

  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << doc.dump(2) << '\n';
}

void write_method_curves(const SelectionReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const MethodReport& m : report.methods) {
    if (!m.boot) continue;
    std::ofstream out(dir + "/" + m.method_id + ".csv");
    if (!out) throw ParseError("cannot write curve file for " + m.method_id);
    out << "b,score_hard,score_smooth\n";
    for (std::size_t i = 0; i < m.boot->hard.replicate_scores.size(); ++i) {
      const double h = m.boot->hard.replicate_scores[i];
      const double s = m.boot->smooth.replicate_scores[i];
      out << i << ',' << (std::isfinite(h) ? format_double(h) : std::string()) << ','
          << (std::isfinite(s) ? format_double(s) : std::string()) << '\n';
    }
  }
}

void write_mc_report(const McReport& report, const ExperimentConfig& config,
                     const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir + "/mc");
  int max_rep = -1;
  for (const McReplicateRow& r : report.replicates) max_rep = std::max(max_rep, r.replicate);
  for (int rep = 0; rep <= max_rep; ++rep) {
    std::ofstream out(dir + "/mc/replicate_" + std::to_string(rep) + ".csv");
    out << "criterion,method_id,k,ari,nvic\n";
    for (const McReplicateRow& r : report.replicates) {
      if (r.replicate != rep) continue;
      out << to_string(r.criterion) << ',' << r.method_id << ',' << r.k << ','
          << format_double(r.ari) << ',' << format_double(r.nvic) << '\n';
    }
  }
  std::ofstream out(dir + "/mc_summary.csv");
  out << "criterion,modal_k,modal_frequency,ari_mean,ari_sd,nvic_mean,nvic_sd,valid_reps\n";
  for (const McAggregateRow& a : report.aggregate) {
    out << to_string(a.criterion) << ',' << a.modal_k << ',' << format_double(a.modal_frequency)
        << ',' << format_double(a.ari_mean) << ',' << format_double(a.ari_sd) << ','
        << format_double(a.nvic_mean) << ',' << format_double(a.nvic_sd) << ',' << a.valid_reps
        << '\n';
  }
  (void)config;
}

}  // namespace qsel
