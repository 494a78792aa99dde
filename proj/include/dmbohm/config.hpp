#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmbohm/scenarios.hpp"

namespace dmbohm {

enum class TrajectoryFormat : std::uint8_t { Csv, Jsonl };

struct OutputConfig {
  std::string dir;  // empty: $DMBOHM_OUT_DIR, else "out"
  TrajectoryFormat format = TrajectoryFormat::Csv;
  bool svg = true;

  bool operator==(const OutputConfig&) const = default;
};

/// INI document with sections [grid], [evolution], [scenario], [output].
///
///   [scenario]
///   variant = real-dm
///   seed = 7
///
/// `scenario.variant` picks the defaults; every other key overrides one field.
/// Unknown sections or keys are BadConfig errors.
struct RunConfig {
  ScenarioConfig scenario;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// (`section.key`, value) pairs for every key in serialization order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c);

/// Every key, numbers in shortest round-trip form.
std::string serialize_config(const RunConfig& c);

/// Set one `section.key` from its text value.
void apply_override(RunConfig& c, std::string_view dotted_key, std::string_view value);

/// FNV-1a 64 of the serialized config, output.dir excluded.
std::uint64_t config_digest(const RunConfig& c);

std::filesystem::path output_directory(const OutputConfig& o);

/// Shortest decimal that parses back to the same double.
std::string format_number(double v);

}  // namespace dmbohm
