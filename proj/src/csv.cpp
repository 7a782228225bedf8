#include "qsel/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace qsel {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, int row, const std::string& column) {
  const std::string s = strip(raw);
  if (s.empty()) {
    std::ostringstream msg;
    msg << "empty cell at row " << row << ", column '" << column << "'";
    throw ParseError(msg.str());
  }
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << "non-numeric cell '" << s << "' at row " << row << ", column '" << column << "'";
    throw ParseError(msg.str());
  }
  return v;
}

}  // namespace

DataMatrix load_csv(const std::string& path, const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw EmptyData("file is empty: " + path);
  if (!line.empty() && line.front() == '\xEF') line = line.substr(3);  // UTF-8 BOM

  const std::vector<std::string> header = split_line(line);
  std::vector<std::string> names;
  int label_index = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string name = strip(header[j]);
    if (label_column && name == *label_column) {
      label_index = static_cast<int>(j);
    } else {
      names.push_back(name);
    }
  }
  if (label_column && label_index < 0) {
    throw ParseError("label column '" + *label_column + "' not found in header");
  }
  const std::size_t width = header.size();
  if (names.empty()) throw EmptyData("no feature columns in: " + path);

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (strip(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != width) {
      std::ostringstream msg;
      msg << "ragged row " << row_number << ": expected " << width << " cells, got "
          << cells.size();
      throw ParseError(msg.str());
    }
    std::vector<double> row;
    row.reserve(names.size());
    int feature = 0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (static_cast<int>(j) == label_index) {
        raw_labels.push_back(strip(cells[j]));
      } else {
        row.push_back(parse_cell(cells[j], row_number, names[static_cast<std::size_t>(feature)]));
        ++feature;
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyData("no data rows in: " + path);

  DataMatrix data;
  data.values.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  data.feature_names = names;
  if (label_index >= 0) {
    std::map<std::string, int> ids;
    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (const std::string& s : raw_labels) {
      auto [it, inserted] = ids.emplace(s, static_cast<int>(ids.size()));
      if (inserted) data.label_names.push_back(s);
      labels.push_back(it->second);
    }
    data.labels = std::move(labels);
  }
  data.validate();
  return data;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const DataMatrix& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  for (int j = 0; j < data.p(); ++j) {
    if (j) out << ',';
    if (!data.feature_names.empty()) {
      out << data.feature_names[static_cast<std::size_t>(j)];
    } else {
      out << 'x' << j;
    }
  }
  if (data.labels) out << ",label";
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) {
      if (j) out << ',';
      out << format_double(data.values(i, j));
    }
    if (data.labels) {
      const int id = (*data.labels)[static_cast<std::size_t>(i)];
      if (id >= 0 && id < static_cast<int>(data.label_names.size())) {
        out << ',' << data.label_names[static_cast<std::size_t>(id)];
      } else {
        out << ',' << id;
      }
    }
    out << '\n';
  }
}

}  // namespace qsel
