#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bridge_rate/error.hpp"
#include "bridge_rate/lattice_law.hpp"
#include "bridge_rate/path.hpp"

namespace bridge_rate {

/// Shortest round-trip decimal for a double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// {"name": "...", "atoms": [[value, prob], ...]}
inline LatticeLaw law_from_json(const nlohmann::json& doc) {
  require(doc.is_object() && doc.contains("atoms"), "law json: expected an object with \"atoms\"");
  std::vector<std::pair<double, double>> atoms;
  for (const auto& a : doc.at("atoms")) {
    require(a.is_array() && a.size() == 2, "law json: each atom must be [value, prob]");
    atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
  }
  return LatticeLaw::from_atoms(doc.value("name", std::string("custom")), std::move(atoms));
}

inline LatticeLaw load_law_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open law file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, "law file '" + path + "': " + e.what());
  }
  return law_from_json(doc);
}

/// Built-in name (rademacher, poisson1) or a path to a JSON law file.
inline LatticeLaw resolve_law(const std::string& spec) {
  if (spec == "rademacher") return make_rademacher();
  if (spec == "poisson1" || spec == "poisson-1" || spec == "poisson_minus_one") return make_poisson_minus_one();
  if (spec.size() > 5 && spec.ends_with(".json")) return load_law_file(spec);
  fail(ErrorCode::InvalidArgument, "unknown law '" + spec + "'");
}

/// '#'-prefixed metadata lines followed by a header row and data rows.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }

  void row(const std::vector<std::string>& cells) {
    require(cells.size() == columns_.size(), "csv: row width mismatch");
    rows_.push_back(cells);
  }

  /// Data section only (header + rows), identical for identical runs.
  std::string data() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << '\n';
    }
    return out.str();
  }

  std::string str() const {
    std::ostringstream out;
    for (const auto& [k, v] : meta_) out << "# " << k << ": " << v << '\n';
    out << data();
    return out.str();
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out << str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

/// Long format: sample_id,k,t,value.
inline void add_path_rows(CsvWriter& csv, std::size_t sample_id, const PathSample& p) {
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    csv.row({std::to_string(sample_id), std::to_string(k), format_double(p.times[k]), format_double(p.values[k])});
  }
}

/// Reads a long-format path file; samples keep their first-appearance order.
inline std::vector<PathSample> read_paths_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open path file '" + path + "'");
  std::map<std::string, std::size_t> slot;
  std::vector<PathSample> out;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      require(line.rfind("sample_id,k,t,value", 0) == 0, path + ": expected header sample_id,k,t,value");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string id, k, t, v;
    if (!std::getline(ss, id, ',') || !std::getline(ss, k, ',') || !std::getline(ss, t, ',') ||
        !std::getline(ss, v, ',')) {
      fail(ErrorCode::InvalidArgument, path + ":" + std::to_string(line_no) + ": malformed row");
    }
    auto [it, inserted] = slot.emplace(id, out.size());
    if (inserted) out.emplace_back();
    auto& p = out[it->second];
    try {
      p.times.push_back(std::stod(t));
      p.values.push_back(std::stod(v));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, path + ":" + std::to_string(line_no) + ": bad number");
    }
  }
  for (auto& p : out) {
    require(p.times.size() >= 2 && p.times.front() == 0.0 && p.times.back() == 1.0,
            path + ": each path must run from t=0 to t=1");
    for (std::size_t i = 1; i < p.times.size(); ++i) {
      require(p.times[i] > p.times[i - 1], path + ": times must increase within a sample");
    }
    p.grid_n = static_cast<std::int64_t>(p.times.size()) - 1;
    p.kind = PathKind::imported;
  }
  return out;
}

}  // namespace bridge_rate
