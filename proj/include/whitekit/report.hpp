#pragma once

// Comparison tables in the layout "model row, model_W row, one column per
// dataset, Avg, delta" and the append-only RunRecord log.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "whitekit/errors.hpp"

namespace whitekit {

struct TableRow {
  std::string label;
  std::vector<std::optional<double>> values;  // one per column
  // Row whose Avg this row's delta is measured against; none for baselines.
  std::optional<std::size_t> baseline;
  // Spread of Avg over the runs this row summarizes, if it is a summary row.
  std::optional<std::pair<double, double>> avg_range;
};

struct ComparisonTable {
  std::string metric;  // "accuracy", "spearman_x100", "isoscore"
  std::vector<std::string> columns;
  std::vector<TableRow> rows;
};

inline std::optional<double> row_average(const TableRow& row) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : row.values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

inline std::optional<double> row_delta(const ComparisonTable& t, std::size_t r) {
  const auto& row = t.rows.at(r);
  if (!row.baseline) return std::nullopt;
  const auto a = row_average(row);
  const auto b = row_average(t.rows.at(*row.baseline));
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

// Two decimals; negative zero prints as 0.00.
inline std::string format_fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

inline bool table_has_delta(const ComparisonTable& t) {
  return std::any_of(t.rows.begin(), t.rows.end(),
                     [](const TableRow& r) { return r.baseline.has_value(); });
}

inline std::string format_table_text(const ComparisonTable& t) {
  std::vector<std::string> header{"Model"};
  for (const auto& c : t.columns) header.push_back(c);
  header.push_back("Avg");
  const bool with_delta = table_has_delta(t);
  if (with_delta) header.push_back("Delta");

  std::vector<std::vector<std::string>> cells{header};
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::vector<std::string> line{row.label};
    for (const auto& v : row.values) line.push_back(v ? format_fixed2(*v) : "-");
    const auto avg = row_average(row);
    line.push_back(avg ? format_fixed2(*avg) : "-");
    if (with_delta) {
      const auto d = row_delta(t, r);
      line.push_back(d ? format_fixed2(*d) : "");
    }
    cells.push_back(std::move(line));
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      width[c] = std::max(width[c], line[c].size());
    }
  }
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& line = cells[i];
    for (std::size_t c = 0; c < line.size(); ++c) {
      const std::string& s = line[c];
      const std::string pad(width[c] - s.size(), ' ');
      out += c == 0 ? s + pad : "  " + pad + s;
    }
    out += '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
      out += std::string(total, '-') + '\n';
    }
  }
  return out;
}

inline std::string format_table_csv(const ComparisonTable& t) {
  const bool with_range = std::any_of(t.rows.begin(), t.rows.end(),
                                      [](const TableRow& r) { return r.avg_range.has_value(); });
  std::string out = "model";
  for (const auto& c : t.columns) out += "," + c;
  out += ",avg,delta";
  if (with_range) out += ",avg_min,avg_max";
  out += '\n';
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    out += row.label;
    for (const auto& v : row.values) out += "," + (v ? num(*v) : std::string{});
    const auto avg = row_average(row);
    out += "," + (avg ? num(*avg) : std::string{});
    const auto d = row_delta(t, r);
    out += "," + (d ? num(*d) : std::string{});
    if (with_range) {
      out += row.avg_range ? "," + num(row.avg_range->first) + "," +
                                 num(row.avg_range->second)
                           : std::string(",,");
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

struct RunRecord {
  std::string dataset;
  std::string model_name;
  std::string task;
  std::string whitening = "none";  // kind or "none"
  std::string fit_scope = "none";
  std::string metric;
  double value = 0.0;
  nlohmann::json config = nlohmann::json::object();
  std::string timestamp;
  std::uint64_t seed = 0;
};

inline double metric_lower_bound(const std::string& metric) {
  return metric == "spearman_x100" ? -100.0 : 0.0;
}

inline double metric_upper_bound(const std::string& metric) {
  return metric == "isoscore" ? 1.0 : 100.0;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["dataset"] = r.dataset;
  j["model_name"] = r.model_name;
  j["task"] = r.task;
  j["whitening"] = r.whitening;
  j["fit_scope"] = r.fit_scope;
  j["metric"] = r.metric;
  j["value"] = r.value;
  j["config"] = r.config;
  j["timestamp"] = r.timestamp;
  j["seed"] = r.seed;
  return j;
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.dataset = j.at("dataset").get<std::string>();
  r.model_name = j.at("model_name").get<std::string>();
  r.task = j.at("task").get<std::string>();
  r.whitening = j.at("whitening").get<std::string>();
  r.fit_scope = j.at("fit_scope").get<std::string>();
  r.metric = j.at("metric").get<std::string>();
  r.value = j.at("value").get<double>();
  r.config = j.value("config", nlohmann::json::object());
  r.timestamp = j.value("timestamp", std::string{});
  r.seed = j.value("seed", std::uint64_t{0});
  return r;
}

inline void append_record(const std::filesystem::path& path, const RunRecord& r) {
  if (!(r.value >= metric_lower_bound(r.metric) - 1e-9 &&
        r.value <= metric_upper_bound(r.metric) + 1e-9)) {
    throw InternalError("run record value outside the bounds of " + r.metric);
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError(path.string(), "cannot open record log");
  out << to_json(r).dump() << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

inline std::vector<RunRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open record log");
  std::vector<RunRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

inline std::string variant_label(const std::string& model,
                                 const std::string& whitening) {
  return whitening == "none" ? model : model + "_W(" + whitening + ")";
}

// Builds a table from records of a single metric: one row per (model,
// whitening) in first-seen order, one column per dataset. Later records for
// the same cell replace earlier ones. Whitened rows measure their delta
// against the raw row of the same model when one exists.
inline ComparisonTable table_from_records(const std::vector<RunRecord>& records,
                                          const std::string& metric) {
  ComparisonTable t;
  t.metric = metric;
  std::map<std::string, std::size_t> col_index, row_index;
  std::vector<std::pair<std::string, std::string>> row_keys;
  std::map<std::pair<std::size_t, std::size_t>, double> cell;
  for (const auto& r : records) {
    if (r.metric != metric) continue;
    if (!col_index.count(r.dataset)) {
      col_index[r.dataset] = t.columns.size();
      t.columns.push_back(r.dataset);
    }
    const std::string label = variant_label(r.model_name, r.whitening);
    if (!row_index.count(label)) {
      row_index[label] = row_keys.size();
      row_keys.emplace_back(r.model_name, r.whitening);
    }
    cell[{row_index[label], col_index[r.dataset]}] = r.value;
  }
  for (std::size_t i = 0; i < row_keys.size(); ++i) {
    TableRow row;
    row.label = variant_label(row_keys[i].first, row_keys[i].second);
    row.values.resize(t.columns.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto it = cell.find({i, c});
      if (it != cell.end()) row.values[c] = it->second;
    }
    if (row_keys[i].second != "none") {
      const auto raw = row_index.find(row_keys[i].first);
      if (raw != row_index.end()) row.baseline = raw->second;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace whitekit
