#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "tail/generator.hpp"
#include "tail/model.hpp"
#include "tail/scenario.hpp"

namespace tail {

using Json = nlohmann::ordered_json;

inline constexpr const char* kInstanceSchema = "tail-instance/1";
inline constexpr const char* kScenarioSchema = "tail-scenarios/1";
inline constexpr const char* kSolutionSchema = "tail-solution/1";
inline constexpr const char* kReportSchema = "tail-report/1";
inline constexpr const char* kConfigSchema = "tail-config/1";
inline constexpr const char* kBenchSchema = "tail-bench/1";
inline constexpr const char* kErrorSchema = "tail-error/1";

/// Two-space indentation; arrays holding only scalars stay on one line.
/// Always ends with a newline.
std::string format_json(const Json& value);

/// Parses text, throwing InputError on malformed JSON.
Json parse_json(const std::string& text);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Times must be whole minutes; connection costs are listed sorted by arc.
Json instance_to_json(const Instance& instance);
/// Validates the schema tag, field types and references. Throws InputError.
Instance instance_from_json(const Json& json);

Json scenarios_to_json(const Instance& instance, const ScenarioSet& scenarios);
/// Scenario columns are matched to activities by id. Throws InputError.
ScenarioSet scenarios_from_json(const Instance& instance, const Json& json);

Json solution_to_json(const Instance& instance, const Solution& solution);
/// Each aircraft must appear exactly once. Throws InputError.
Solution solution_from_json(const Instance& instance, const Json& json);

/// Generator settings plus the scenario count and distribution.
struct GenerateConfig {
  InstanceConfig instance;
  int scenarios = 10;
  DelayDistribution distribution;
};
Json config_to_json(const GenerateConfig& config);
/// Missing fields keep their defaults; unknown fields are rejected.
GenerateConfig config_from_json(const Json& json);

/// FNV-1a over the formatted instance JSON, as 16 hex digits.
std::string instance_digest(const Instance& instance);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace tail
