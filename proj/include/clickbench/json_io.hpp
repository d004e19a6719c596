#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "clickbench/env.hpp"
#include "clickbench/layout.hpp"
#include "clickbench/protocol.hpp"
#include "clickbench/runner.hpp"
#include "clickbench/synthetic.hpp"

// nlohmann/json ADL hooks. Field names follow the documented schemas in the
// README; every reader throws Error(DataFormatError) on malformed input.
namespace clickbench {

void to_json(nlohmann::json& j, const Viewport& v);
void from_json(const nlohmann::json& j, Viewport& v);
void to_json(nlohmann::json& j, const Point& p);
void from_json(const nlohmann::json& j, Point& p);
void to_json(nlohmann::json& j, const BoundingBox& b);
void from_json(const nlohmann::json& j, BoundingBox& b);
void to_json(nlohmann::json& j, const Rgba& c);
void from_json(const nlohmann::json& j, Rgba& c);
void to_json(nlohmann::json& j, const LayoutElement& e);
void from_json(const nlohmann::json& j, LayoutElement& e);
void to_json(nlohmann::json& j, const PageLayout& l);
void from_json(const nlohmann::json& j, PageLayout& l);
void to_json(nlohmann::json& j, const GenSpec& g);
void from_json(const nlohmann::json& j, GenSpec& g);
void to_json(nlohmann::json& j, const TaskSpec& t);
void from_json(const nlohmann::json& j, TaskSpec& t);
void to_json(nlohmann::json& j, const Action& a);
void from_json(const nlohmann::json& j, Action& a);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);
void to_json(nlohmann::json& j, const AgentTurn& t);
void from_json(const nlohmann::json& j, AgentTurn& t);
void to_json(nlohmann::json& j, const EpisodeRecord& r);
void from_json(const nlohmann::json& j, EpisodeRecord& r);

Formulation formulation_from_string(std::string_view s);

/// One TaskSpec per line. Relative snapshot paths are resolved against the
/// manifest's directory on read.
void write_task_manifest(const std::filesystem::path& path, std::span<const TaskSpec> tasks);
std::vector<TaskSpec> read_task_manifest(const std::filesystem::path& path);

std::vector<EpisodeRecord> read_records_jsonl(const std::filesystem::path& path);
void write_records_jsonl(const std::filesystem::path& path, std::span<const EpisodeRecord> records);

/// Reads every non-empty line of a JSON-lines file.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

}  // namespace clickbench
