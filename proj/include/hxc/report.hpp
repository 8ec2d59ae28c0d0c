#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

namespace hxc {

/// Outcome of one named check, one JSON object per line in the event log.
struct CheckRecord {
  std::string check;
  int n_log2 = 0;
  double beta = 0.0;
  std::optional<double> epsilon;
  double result = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  nlohmann::ordered_json witness;  // null when absent
};

/// Append-only JSON-lines log. Every line carries the config hash and seed.
class JsonLinesLog {
public:
  JsonLinesLog(const std::filesystem::path& path, std::string config_hash, std::uint64_t seed);

  void check(const CheckRecord& r);
  void event(const std::string& name, nlohmann::ordered_json payload);

  /// Stable text for a double: round-trip exact, "inf"/"nan" as strings.
  static nlohmann::ordered_json number(double v);

private:
  void write(nlohmann::ordered_json j);

  std::ofstream out_;
  std::string hash_;
  std::uint64_t seed_;
};

/// "PASS"/"FAIL" summary line used by the command-line runner and the acceptance binary.
std::string summary_line(const CheckRecord& r);

} // namespace hxc
