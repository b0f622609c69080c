#include "blocksparse/harness/csv.hpp"

#include "blocksparse/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace blocksparse::harness {

namespace {

void check_text(const std::string& field, const char* what) {
  if (field.find_first_of(",\"\n\r") != std::string::npos) {
    throw ConfigError(std::string("csv: ") + what + " '" + field + "' contains a delimiter, quote or newline");
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::string> CsvSchema::header() const {
  std::vector<std::string> h{"schema_version", "experiment", "trial", "seed", "method"};
  h.insert(h.end(), param_names.begin(), param_names.end());
  h.insert(h.end(), metric_names.begin(), metric_names.end());
  h.emplace_back("termination");
  h.emplace_back("failed");
  return h;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, CsvSchema schema) : schema_(std::move(schema)) {
  const auto header = schema_.header();
  for (const auto& name : header) check_text(name, "column name");
  out_.open(path, std::ios::trunc);
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
  out_.flush();
  if (!out_) throw IoError("write failed: " + path.string());
}

void CsvWriter::write(const CsvRow& row) {
  if (row.params.size() != schema_.param_names.size()) {
    throw ConfigError("csv: row has " + std::to_string(row.params.size()) + " parameters, schema declares " +
                      std::to_string(schema_.param_names.size()));
  }
  if (row.metrics.size() != schema_.metric_names.size()) {
    throw ConfigError("csv: row has " + std::to_string(row.metrics.size()) + " metrics, schema declares " +
                      std::to_string(schema_.metric_names.size()));
  }
  check_text(row.experiment, "experiment");
  check_text(row.method, "method");
  check_text(row.termination, "termination");
  if (row.experiment.empty() || row.method.empty()) throw ConfigError("csv: experiment and method are required");
  if (row.trial < 0) throw ConfigError("csv: trial must be >= 0");

  std::ostringstream line;
  line << kCsvSchemaVersion << ',' << row.experiment << ',' << row.trial << ',' << row.seed << ',' << row.method;
  for (const double p : row.params) line << ',' << format_number(p);
  for (const double m : row.metrics) line << ',' << format_number(m);
  line << ',' << row.termination << ',' << (row.failed ? 1 : 0) << '\n';

  std::lock_guard lock(mutex_);
  out_ << line.str();
  out_.flush();
  if (!out_) throw IoError("csv: write failed");
}

std::vector<std::vector<std::string>> read_results_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto expected = schema.header();
  if (split(line) != expected) throw IoError(path.string() + ": header does not match the schema");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    auto fields = split(line);
    if (fields.size() != expected.size()) {
      throw IoError(path.string() + ": row " + std::to_string(rows.size() + 1) + " has " +
                    std::to_string(fields.size()) + " fields, expected " + std::to_string(expected.size()));
    }
    if (fields[0] != std::to_string(kCsvSchemaVersion)) throw IoError(path.string() + ": unknown schema version");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace blocksparse::harness
