#include "plurikit/report.hpp"

#include <fstream>
#include <sstream>

#include "plurikit/errors.hpp"
#include "plurikit/profiles.hpp"

namespace plurikit {

void KeyValues::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void KeyValues::set(const std::string& key, double value) { set(key, format_number(value)); }

void KeyValues::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

void KeyValues::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

std::string KeyValues::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return {};
}

bool KeyValues::contains(const std::string& key) const {
  for (const auto& entry : entries_)
    if (entry.first == key) return true;
  return false;
}

std::string KeyValues::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

double ExperimentReport::degenerate_fraction() const {
  return total_frames == 0 ? 0.0 : static_cast<double>(degenerate_frames) / static_cast<double>(total_frames);
}

std::string ExperimentReport::table_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
    out += "\n";
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& report) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "report.csv", report.table_csv());

  KeyValues summary;
  summary.set("experiment", report.name);
  summary.set("verdict", report.has_verdict ? std::string(report.passed ? "pass" : "fail") : std::string("none"));
  summary.set("frames_total", report.total_frames);
  summary.set("frames_degenerate", report.degenerate_frames);
  summary.set("degenerate_fraction", report.degenerate_fraction());
  for (const auto& [k, v] : report.summary.entries()) summary.set(k, v);
  write_text_file(dir / "summary.txt", summary.to_text());

  KeyValues meta;
  meta.set("experiment", report.name);
  for (const auto& [k, v] : report.inputs.entries()) meta.set(k, v);
  write_text_file(dir / "meta.txt", meta.to_text());

  std::ostringstream timing;
  timing << "wall_seconds=" << format_number(report.wall_seconds) << "\n";
  write_text_file(dir / "timing.txt", timing.str());
}

}  // namespace plurikit
