#include "czx/report.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "czx/error.hpp"
#include "czx/field_io.hpp"

namespace czx {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else {
          return csv_escape(v);
        }
      },
      c);
}

nlohmann::ordered_json number_json(double v) {
  // JSON has no inf/nan; keep them as strings so output stays parseable.
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          return number_json(v);
        } else {
          return v;
        }
      },
      c);
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skip: return "skip";
  }
  return "?";
}

SweepReport::SweepReport(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

void SweepReport::add_row(std::vector<Cell> cells, Verdict verdict, std::string note) {
  if (cells.size() != columns_.size()) throw Error(Errc::invalid_input, "row width does not match report columns");
  rows_.push_back(ReportRow{std::move(cells), verdict, std::move(note)});
}

void SweepReport::set_metric(const std::string& key, double value) { metrics_[key] = value; }

double SweepReport::metric(const std::string& key) const {
  const auto it = metrics_.find(key);
  if (it == metrics_.end()) throw Error(Errc::invalid_input, "no metric " + key);
  return it->second;
}

bool SweepReport::has_metric(const std::string& key) const { return metrics_.contains(key); }

void SweepReport::append(const SweepReport& other, const std::string& prefix) {
  if (other.columns_ != columns_) throw Error(Errc::invalid_input, "cannot append reports with different columns");
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
  for (const auto& [k, v] : other.metrics_) metrics_[prefix.empty() ? k : prefix + "." + k] = v;
}

std::size_t SweepReport::count(Verdict v) const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.verdict == v ? 1 : 0;
  return n;
}

std::string SweepReport::to_csv() const {
  std::ostringstream out;
  for (const auto& c : columns_) out << csv_escape(c) << ',';
  out << "verdict,note\n";
  for (const auto& r : rows_) {
    for (const auto& c : r.cells) out << cell_text(c) << ',';
    out << to_string(r.verdict) << ',' << csv_escape(r.note) << '\n';
  }
  return out.str();
}

std::string SweepReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name_;
  j["columns"] = columns_;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : rows_) {
    nlohmann::ordered_json row;
    for (std::size_t i = 0; i < columns_.size(); ++i) row[columns_[i]] = cell_json(r.cells[i]);
    row["verdict"] = std::string(to_string(r.verdict));
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metrics_) metrics[k] = number_json(v);
  j["metrics"] = std::move(metrics);
  j["pass"] = count(Verdict::pass);
  j["fail"] = count(Verdict::fail);
  j["skip"] = count(Verdict::skip);
  return j.dump(2);
}

}  // namespace czx
