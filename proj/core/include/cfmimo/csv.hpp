#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cfmimo/harness.hpp"

namespace cfmimo {

inline constexpr const char* kCsvHeader =
    "snr_db,alpha,precoder,mean_sum_rate,std_err,mean_iterations,flops";

/// Manifest path for a CSV path: same directory, extension ".manifest".
std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path);

std::string render_csv(const std::vector<SweepRow>& rows);
std::string render_manifest(const SweepResult& result);

/// Writes the CSV and its sibling manifest. Throws IoError naming the path.
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

/// Parses text produced by render_csv. Throws ConfigError on malformed input.
std::vector<SweepRow> parse_csv(const std::string& text);

std::vector<SweepRow> read_csv(const std::filesystem::path& path);

/// Applies the output-directory override from the environment
/// (CFMIMO_OUTPUT_DIR) to a configured output path.
std::filesystem::path resolve_output_path(const std::string& configured);

inline constexpr const char* kOutputDirEnv = "CFMIMO_OUTPUT_DIR";

/// Library version string embedded in manifests.
std::string code_version();

}  // namespace cfmimo
