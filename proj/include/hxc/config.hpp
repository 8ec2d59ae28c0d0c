#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hxc/decomposition.hpp"
#include "hxc/dyadic.hpp"
#include "hxc/linearized.hpp"
#include "hxc/multiplier.hpp"

namespace hxc {

/// Unknown key, malformed value or inconsistent setting in an experiment config.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Resolved experiment settings. The text form is INI-like:
///
///   [grid]
///   n_log2 = 5
///   [profile]
///   kind = bump
///   epsilon = 0.25
///
/// Every key has a type and a default; see `config_keys()` for the full list.
struct ExperimentConfig {
  std::string command;

  // [run]
  std::uint64_t seed = 1;
  bool reproducible = false;
  int threads = 0;

  // [grid]
  int n_log2 = 4;

  // [profile]
  std::string profile_kind = "bump";
  double epsilon = 1.0;
  double inner = 1.0;
  double outer = 2.0;

  // [linearizer]
  LinearizerSpec linearizer{RegularityKind::lip_x, 1.0, 4.0, 1.0, -1.0, 0.0, 4};

  // [operator]
  double beta = 1.0;
  Orientation orientation = Orientation::first_scaled;
  bool truncate = true;
  Quantize quantize = Quantize::exact;

  // [field]
  std::string field_kind = "random";  // random | bandlimited
  int band = 4;

  // [dyadic]
  DyadicVariant dyadic_variant = DyadicVariant::rows;
  double dyadic_lipschitz = 0.5;
  int dyadic_depth = 5;

  // [decompose]
  LadderKind ladder = LadderKind::dyadic;
  int triples = 10000;

  // [normest]
  std::string method = "power";  // power | ascent | search
  double p = 2.0;
  int restarts = 25;
  double tol = 1e-10;
  int max_iter = 500;
  int budget = 1000;
  int knots = 16;
  double level_lo = -4.0;
  double level_hi = 4.0;
  double search_lipschitz = 8.0;
  std::string constraint = "both";  // lipschitz | none | both

  // [sweep]
  std::vector<double> epsilons{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};

  // [verify]
  int cases = 5;

  MultiplierProfile profile() const;

  /// Every key as "section.key = value", in table order, with round-trip numbers.
  std::string canonical() const;

  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

/// "section.key" for every accepted key.
std::vector<std::string> config_keys();

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Cross-key checks (ranges, profile construction, linearizer class); throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

} // namespace hxc
