#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace czx {

enum class Verdict { pass, fail, skip };

std::string_view to_string(Verdict v) noexcept;

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct ReportRow {
  std::vector<Cell> cells;
  Verdict verdict = Verdict::pass;
  std::string note;
};

/// Tabular record of (parameter point, measured quantity, bound, verdict)
/// rows plus named scalar metrics. Serialization is deterministic: doubles
/// use the shortest round-trip representation and metrics are key-sorted.
class SweepReport {
 public:
  SweepReport() = default;
  SweepReport(std::string name, std::vector<std::string> columns);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<ReportRow>& rows() const noexcept { return rows_; }
  const std::map<std::string, double>& metrics() const noexcept { return metrics_; }

  void add_row(std::vector<Cell> cells, Verdict verdict, std::string note = {});
  void set_metric(const std::string& key, double value);
  double metric(const std::string& key) const;
  bool has_metric(const std::string& key) const;

  /// Appends all rows of `other` (columns must match); metrics are merged
  /// with a "<prefix>." key prefix when `prefix` is non-empty.
  void append(const SweepReport& other, const std::string& prefix = {});

  std::size_t count(Verdict v) const noexcept;
  bool passed() const noexcept { return count(Verdict::fail) == 0; }

  /// Columns, then verdict and note.
  std::string to_csv() const;
  /// {"name", "columns", "rows": [...], "metrics": {...}, "pass", "fail", "skip"}.
  std::string to_json() const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<ReportRow> rows_;
  std::map<std::string, double> metrics_;
};

}  // namespace czx
