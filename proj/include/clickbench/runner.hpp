#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clickbench/agents.hpp"
#include "clickbench/backend.hpp"
#include "clickbench/protocol.hpp"

namespace clickbench {

struct EpisodeRecord {
  std::string task_id;
  std::size_t task_index = 0;
  std::size_t repetition = 0;
  RunConfig config;
  BoundingBox target_bbox;
  std::vector<AgentTurn> turns;
  CursorState initial_cursor;
  /// Cursor position after each executed move (post-clamping).
  std::vector<Point> moves;
  std::optional<Point> click_point;
  bool success = false;
  bool first_move_outside = false;
  bool corrected_success = false;
  bool infra_failure = false;
  std::string infra_error;
  int steps_used = 0;

  bool operator==(const EpisodeRecord&) const = default;
};

/// What the runner saw at one step; lets callers (Stage-2 collection) reuse
/// the exact teacher prompts.
struct StepCapture {
  int step_index = 0;
  std::shared_ptr<const Raster> observation;
  const std::vector<Message>* reasoning_prompt = nullptr;
  const AgentTurn* turn = nullptr;
};

using StepObserver = std::function<void(const StepCapture&)>;

/// One episode: reasoning and action sub-steps per turn until a click or the
/// step quota. Parse errors consume a step without touching the environment.
/// Remote transport failures mark the record as an infra failure.
EpisodeRecord run_episode(PageBackend& backend, Agent& agent, const TaskSpec& task, const RunConfig& config,
                          CursorState initial_cursor, const EpisodeContext& episode = {},
                          const StepObserver& observer = {});

enum class CursorInit {
  /// Seeded uniform over the viewport, stream (config.seed, task, rep).
  Uniform,
  /// The task's suggested_cursor (falls back to Uniform when absent).
  FromTask,
};

enum class Execution { Serial, Parallel };

/// Uniform initial cursor: Rng rng(mix64(derive_seed(seed, task, rep) ^ kCursorSalt));
/// x = uniform(0, width - 1), y = uniform(0, height - 1).
inline constexpr std::uint64_t kCursorSalt = 0x637572736F72ULL;  // "cursor"
CursorState initial_cursor_for(const RunConfig& config, std::size_t task_index, std::size_t repetition,
                               const Viewport& viewport, const TaskSpec& task, CursorInit mode);

struct BenchmarkOptions {
  CursorInit cursor_init = CursorInit::Uniform;
  Execution execution = Execution::Parallel;
  /// When set, records.jsonl and exclusions.jsonl stream here.
  std::optional<std::filesystem::path> out_dir;
};

struct BenchmarkResult {
  std::size_t n_tasks = 0;
  std::vector<std::pair<std::string, ExclusionVerdict>> exclusions;
  /// Ordered by (task index, repetition) regardless of execution mode.
  std::vector<EpisodeRecord> records;

  std::size_t n_excluded() const { return exclusions.size(); }
  std::size_t n_infra_failures() const;
};

/// Runs the exclusion check per task, then `repetitions` episodes for every
/// admitted task. Parallel execution gives results identical to Serial.
BenchmarkResult run_benchmark(const BackendFactory& backends, const AgentFactory& agents,
                              std::span<const TaskSpec> tasks, const RunConfig& config,
                              const BenchmarkOptions& options = {});

}  // namespace clickbench
