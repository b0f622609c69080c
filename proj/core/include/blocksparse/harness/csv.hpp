#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

namespace blocksparse::harness {

inline constexpr int kCsvSchemaVersion = 1;

/// Column layout of one results file:
///   schema_version, experiment, trial, seed, method, <params...>, <metrics...>,
///   termination, failed
struct CsvSchema {
  std::vector<std::string> param_names;
  std::vector<std::string> metric_names;

  [[nodiscard]] std::vector<std::string> header() const;
};

struct CsvRow {
  std::string experiment;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::vector<double> params;
  std::vector<double> metrics;
  std::string termination;
  bool failed = false;
};

/// Fixed-precision formatting ("%.17g"; nan and inf spelled out) so equal
/// doubles always produce equal bytes.
std::string format_number(double v);

/// Single-writer CSV sink. The header is written on construction; each row is
/// validated against the schema before it is written (throws ConfigError on a
/// mismatch or a text field containing a delimiter, quote or newline).
/// Thread-safe.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, CsvSchema schema);

  void write(const CsvRow& row);
  [[nodiscard]] const CsvSchema& schema() const { return schema_; }

 private:
  CsvSchema schema_;
  std::ofstream out_;
  std::mutex mutex_;
};

/// Parses a file written by CsvWriter and checks its header and field counts.
/// Returns the data rows as raw string fields. Throws IoError on mismatch.
std::vector<std::vector<std::string>> read_results_csv(const std::filesystem::path& path, const CsvSchema& schema);

}  // namespace blocksparse::harness
