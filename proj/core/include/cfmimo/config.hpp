#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfmimo/precoding.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

struct ExperimentConfig {
  SystemConfig system;
  /// SNR = rho_f / sigma_w2 in dB; rho_f is swept, sigma_w2 stays fixed.
  std::vector<double> snr_grid_db = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  std::vector<double> alpha_grid = {0.15};
  int n_drops = 200;
  std::vector<PrecoderKind> precoders = {PrecoderKind::kZf, PrecoderKind::kMmse,
                                         PrecoderKind::kRobust};
  RobustSettings robust;
  std::string output_path = "results.csv";
  std::uint64_t master_seed = 1;
  /// Worker threads for the trial fan-out; 0 picks hardware concurrency.
  /// Never affects results.
  int workers = 0;

  void validate() const;
};

/// Ordered (key, value) pairs. Keys use dotted field paths, e.g. system.L.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses the flat `key = value` format: one pair per line, `#` starts a
/// comment, blank lines are ignored. Throws ConfigError with the line number.
KeyValues parse_key_values(std::string_view text);

/// Reads and parses a config file. Throws IoError if it cannot be read.
KeyValues read_key_values(const std::filesystem::path& path);

/// Applies one override. Unknown keys and malformed values throw ConfigError.
void apply_setting(ExperimentConfig& cfg, std::string_view key,
                   std::string_view value);

void apply_settings(ExperimentConfig& cfg, const KeyValues& kv);

/// Every key with its current value in canonical order; feeding the result
/// back through apply_settings reproduces the config exactly.
KeyValues to_key_values(const ExperimentConfig& cfg);

/// List of all recognised keys (for help output).
std::vector<std::string> known_keys();

/// Shortest round-trippable decimal rendering of a double.
std::string format_double(double value);

}  // namespace cfmimo
