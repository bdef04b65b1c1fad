#include "rabic/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include <fmt/format.h>

#include "json.hpp"

namespace rabic::io {
namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

void append_metrics(Report& r, const std::string& prefix, const sim::Metrics& m) {
  r.emplace_back(prefix + "peak_contact_force", m.peak_contact_force);
  r.emplace_back(prefix + "terminal_mean_contact_force", m.terminal_mean_contact_force);
  r.emplace_back(prefix + "inner_rmse", m.inner_rmse);
  r.emplace_back(prefix + "outer_rmse", m.outer_rmse);
  r.emplace_back(prefix + "rms_torque_rate", m.rms_torque_rate);
  r.emplace_back(prefix + "max_abs_torque", m.max_abs_torque);
  r.emplace_back(prefix + "final_second_force_slope", m.final_second_force_slope);
  r.emplace_back(prefix + "final_second_force_decreasing", m.final_second_force_decreasing);
}

}  // namespace

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp =
      path.parent_path() / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename into " + path.string());
  }
}

std::string format_number(double value) { return fmt::format("{}", value); }

std::string log_csv(const sim::SimLog& log) {
  std::string out = fmt::format("# config_hash={} geometry_hash={}\n", log.config_hash,
                                log.geometry_hash);
  out += join(log.columns());
  out += '\n';
  fmt::memory_buffer buf;
  for (const sim::LogRow& row : log.rows) {
    const std::vector<double> values = log.flatten(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) buf.push_back(',');
      fmt::format_to(std::back_inserter(buf), "{}", values[i]);
    }
    buf.push_back('\n');
  }
  out.append(buf.data(), buf.size());
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(ss, cell, ',')) table.header.push_back(cell);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      row.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Report metrics_report(const sim::Metrics& metrics) {
  Report r;
  append_metrics(r, "", metrics);
  return r;
}

Report comparison_report(const sim::Comparison& cmp) {
  Report r;
  r.emplace_back("label_a", cmp.label_a);
  r.emplace_back("label_b", cmp.label_b);
  append_metrics(r, cmp.label_a + ".", cmp.metrics_a);
  append_metrics(r, cmp.label_b + ".", cmp.metrics_b);
  for (const sim::MetricRatio& ratio : cmp.ratios) {
    r.emplace_back("ratio." + ratio.name, ratio.ratio);
  }
  r.emplace_back("terminal_force_ratio", cmp.terminal_force_ratio);
  r.emplace_back("attenuation_threshold", sim::kAttenuationThreshold);
  r.emplace_back(cmp.label_b + "_attenuates", cmp.b_attenuates);
  r.emplace_back(cmp.label_a + "_final_second_decreasing", cmp.a_final_second_decreasing);
  r.emplace_back(cmp.label_b + "_final_second_decreasing", cmp.b_final_second_decreasing);
  return r;
}

std::string report_text(const Report& report) {
  std::string out;
  for (const auto& [key, value] : report) {
    std::string text;
    if (const auto* d = std::get_if<double>(&value)) {
      text = format_number(*d);
    } else if (const auto* b = std::get_if<bool>(&value)) {
      text = *b ? "true" : "false";
    } else if (const auto* s = std::get_if<std::string>(&value)) {
      text = *s;
    } else {
      const auto& o = std::get<std::optional<double>>(value);
      text = o ? format_number(*o) : "n/a";
    }
    out += key + " = " + text + "\n";
  }
  return out;
}

std::string report_json(const Report& report) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::optional<double>>) {
            j[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
          } else {
            j[key] = v;
          }
        },
        value);
  }
  return j.dump(2) + "\n";
}

std::string force_profile_csv(const sim::Comparison& cmp) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "t,force_{},force_{},ratio\n", cmp.label_a, cmp.label_b);
  for (const sim::ForceSample& s : cmp.force_profile) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},", s.t, s.force_a, s.force_b);
    if (s.ratio) fmt::format_to(std::back_inserter(buf), "{}", *s.ratio);
    buf.push_back('\n');
  }
  return fmt::to_string(buf);
}

}  // namespace rabic::io
