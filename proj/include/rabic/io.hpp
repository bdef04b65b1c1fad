#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rabic/simulation.hpp"

namespace rabic::io {

/// Writes `content` to a temporary sibling of `path` and renames it into place,
/// so readers never observe a partial file. Throws std::runtime_error on I/O failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// CSV rendering of a log: a `# config_hash=... geometry_hash=...` comment line,
/// the column header, then one line per row.
std::string log_csv(const sim::SimLog& log);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV. Lines starting with '#' are skipped.
CsvTable read_csv(const std::filesystem::path& path);

/// Flat report entry. An empty optional renders as "n/a" in text and null in JSON.
using ReportValue = std::variant<double, bool, std::string, std::optional<double>>;
using Report = std::vector<std::pair<std::string, ReportValue>>;

Report metrics_report(const sim::Metrics& metrics);
Report comparison_report(const sim::Comparison& cmp);

/// `key = value` lines.
std::string report_text(const Report& report);
/// One JSON object with the same keys, in the same order.
std::string report_json(const Report& report);

/// t, force_a, force_b, ratio (empty when not applicable).
std::string force_profile_csv(const sim::Comparison& cmp);

}  // namespace rabic::io
