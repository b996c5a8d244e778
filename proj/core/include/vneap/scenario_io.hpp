#ifndef VNEAP_SCENARIO_IO_HPP_
#define VNEAP_SCENARIO_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "vneap/scenario.hpp"

namespace vneap {

inline constexpr int kScenarioSchemaVersion = 1;

/// Scenario schema v1 (see docs/formats.md). Output is deterministic: equal
/// scenarios serialize to identical bytes.
nlohmann::json scenario_to_json(const Scenario& s);
/// Throws FormatError on schema mismatch or missing fields, InvalidArgument
/// when the decoded objects break their invariants. VNRs are re-sorted by
/// arrival.
Scenario scenario_from_json(const nlohmann::json& j);

void save_scenario(const Scenario& s, const std::filesystem::path& path);
/// Throws FormatError on unreadable, truncated or mismatched files.
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json config_to_json(const ScenarioConfig& cfg);
/// Missing keys keep their defaults; unknown keys and wrong types throw
/// FormatError naming the field and `origin`.
ScenarioConfig config_from_json(const nlohmann::json& j, std::string_view origin = "config");

/// Parses a JSON file, mapping syntax errors to FormatError.
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes j with two-space indentation and a trailing newline.
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace vneap

#endif  // VNEAP_SCENARIO_IO_HPP_
