#include "core/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace airylab {

std::string format_double(double v) {
  char buf[40];
  // shortest representation that parses back exactly
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = std::strtod(buf, nullptr);
    if (back == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_ensemble_csv(const LineEnsemble& ensemble, std::ostream& out) {
  out << "line_index,time,value\n";
  for (int i = 0; i < ensemble.line_count(); ++i)
    for (int j = 0; j < ensemble.grid.size(); ++j)
      out << (i + 1) << ',' << format_double(ensemble.grid.time(j)) << ','
          << format_double(ensemble.value(i, j)) << '\n';
}

LineEnsemble read_ensemble_csv(std::istream& in, double variance) {
  std::string line;
  if (!std::getline(in, line) || line != "line_index,time,value")
    throw ConfigError("ensemble csv: bad header");
  std::vector<std::vector<double>> values;
  std::vector<double> times;
  bool first_line_done = false;
  size_t col = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f0, f1, f2;
    if (!std::getline(row, f0, ',') || !std::getline(row, f1, ',') || !std::getline(row, f2))
      throw ConfigError("ensemble csv: malformed row");
    size_t idx = std::stoul(f0);
    double t = std::strtod(f1.c_str(), nullptr);
    double v = std::strtod(f2.c_str(), nullptr);
    if (idx == 0 || idx > values.size() + 1) throw ConfigError("ensemble csv: bad line_index order");
    if (idx == values.size() + 1) {
      values.emplace_back();
      if (values.size() == 2) first_line_done = true;
      col = 0;
    }
    if (!first_line_done)
      times.push_back(t);
    else if (col >= times.size() || t != times[col])
      throw ConfigError("ensemble csv: lines disagree on grid times");
    values.back().push_back(v);
    ++col;
  }
  if (values.empty() || times.size() < 2) throw ConfigError("ensemble csv: no data");
  LineEnsemble e;
  e.grid = GridSpec{times.front(), times.back(), static_cast<int>(times.size()) - 1};
  e.grid.validate();
  for (size_t j = 0; j < times.size(); ++j)
    if (std::fabs(e.grid.time(static_cast<int>(j)) - times[j]) >
        1e-9 * std::max(1.0, std::fabs(times[j])))
      throw ConfigError("ensemble csv: grid times are not uniform");
  e.lines.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != times.size()) throw ConfigError("ensemble csv: ragged lines");
    e.lines[i].grid = e.grid;
    e.lines[i].variance = variance;
    e.lines[i].values = std::move(values[i]);
  }
  return e;
}

nlohmann::json jam_graph_to_json(const JamGraph& graph) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [i, j] : graph.edges) edges.push_back({i, j});
  return nlohmann::json{{"format_version", 1},
                        {"k", graph.k},
                        {"ell", graph.ell},
                        {"delta", graph.delta},
                        {"edges", edges}};
}

JamGraph jam_graph_from_json(const nlohmann::json& j) {
  JamGraph g;
  g.k = j.at("k").get<int>();
  g.ell = j.at("ell").get<int>();
  g.delta = j.at("delta").get<double>();
  for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return g;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << contents;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace airylab
