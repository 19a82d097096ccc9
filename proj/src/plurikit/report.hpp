#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace plurikit {

/// Ordered key=value block.
class KeyValues {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, bool value);
  void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
  void set(const std::string& key, long long value);
  void set(const std::string& key, std::size_t value) { set(key, static_cast<long long>(value)); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  //! Empty string if absent.
  std::string get(const std::string& key) const;
  bool contains(const std::string& key) const;
  std::string to_text() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct ExperimentReport {
  std::string name;
  KeyValues inputs;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  KeyValues summary;
  //! False for exploratory runs that report residuals without a verdict.
  bool has_verdict = true;
  bool passed = false;
  std::size_t total_frames = 0;
  std::size_t degenerate_frames = 0;
  double wall_seconds = 0.0;

  double degenerate_fraction() const;
  std::string table_csv() const;
};

//! report.csv, summary.txt, meta.txt (deterministic) and timing.txt.
void write_report(const std::filesystem::path& dir, const ExperimentReport& report);

//! Writes text with LF line endings, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace plurikit
