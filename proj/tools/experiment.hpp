#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace dimlab::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitAuditFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses a config file; throws cli.ConfigError on unreadable or malformed JSON.
Json load_config_file(const std::filesystem::path& path);
Json parse_config_text(const std::string& text);

/// The config with every default filled in. Throws cli.ConfigError on unknown
/// keys, wrong types, a missing seed or an unknown command.
Json effective_config(const Json& config);

struct Outcome {
  Json report;
  bool pass = true;
  /// One human-readable line per result, printed by the CLI.
  std::vector<std::string> lines;
  std::vector<std::filesystem::path> files;
};

/// Runs the configured command, writing CSV files and report.json into the
/// output directory (each via a temporary file and rename).
Outcome run_experiment(const Json& config);

/// temp file + rename
void write_atomic(const std::filesystem::path& path, const std::string& body);

}  // namespace dimlab::cli
