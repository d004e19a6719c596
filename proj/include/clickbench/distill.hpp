#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clickbench/agents.hpp"
#include "clickbench/backend.hpp"
#include "clickbench/protocol.hpp"
#include "clickbench/runner.hpp"
#include "clickbench/synthetic.hpp"

namespace clickbench {

struct PrivilegedHint {
  CursorState cursor;
  BoundingBox target_bbox;
  Action correct_action = MouseClick{};

  bool operator==(const PrivilegedHint&) const = default;
};

enum class Stage { One, Two };

struct SampleMeta {
  std::string task_id;
  int step_index = 0;
  std::uint64_t seed = 0;
  std::string target_text;
  /// Present on Stage-1 samples; carries the ground-truth label.
  std::optional<PrivilegedHint> hint;

  bool operator==(const SampleMeta&) const = default;
};

struct DistillSample {
  Stage stage = Stage::One;
  std::vector<Message> teacher_messages;
  std::vector<Message> student_messages;
  std::string target_output;
  SampleMeta meta;

  bool operator==(const DistillSample&) const = default;
};

/// MouseClick when the cursor hits the bbox, else a move to the rounded center.
Action label_action(CursorState cursor, const BoundingBox& bbox);

/// The hint line: "HINT: cursor=(cx, cy); target_bbox=(x, y, w, h); correct_action=..."
std::string hint_text(const PrivilegedHint& hint);

struct Stage1Spec {
  GenSpec gen;
  /// Probability of a cursor placed inside the target. Unset: the cursor sits
  /// at gen.cursor_distance from the target center as the generator places it.
  /// Set: inside with this probability, otherwise outside the bbox at a
  /// distance drawn from gen.cursor_distance.
  std::optional<double> click_fraction;
  Formulation formulation = Formulation::Simplified;

  void validate() const;
};

/// Samples [first, first + count). Teacher: guidance present, trace hidden,
/// hint appended as its own text part of the task message. Student: the same
/// messages without that part. target_output is the oracle think block
/// followed by the labelled action cell.
std::vector<DistillSample> gen_stage1_samples(const Stage1Spec& spec, std::size_t count, std::size_t first = 0,
                                              Execution execution = Execution::Parallel);

/// Fraction of samples whose parsed action variant (move or click) matches
/// the hint label. Unparseable replies count as wrong. Samples without a
/// hint are skipped; returns 0 for an empty set.
double eval_move_or_click(const AgentFactory& agents, std::span<const DistillSample> samples);

struct Stage2Options {
  std::uint64_t seed = 0;
  Formulation formulation = Formulation::Simplified;
  CursorInit cursor_init = CursorInit::Uniform;
  Execution execution = Execution::Parallel;
};

/// Runs each task once under the teacher condition (trace hidden, guidance
/// present). Every step t of a successful episode yields one sample: the
/// student sees the task, the step-t screenshot and turns 0..t-1 as visible
/// trace, without the guidance block. target_output is the teacher's step-t
/// reasoning reply and action reply joined by a newline.
std::vector<DistillSample> collect_stage2(const BackendFactory& backends, const AgentFactory& agents,
                                          std::span<const TaskSpec> tasks, int quota,
                                          const Stage2Options& options = {});

inline constexpr int kDistillSchemaVersion = 1;

/// One JSON object per line; screenshots go to images/<sha256>.png next to
/// the file and are referenced by relative path. meta.image_hashes lists the
/// sha256 of every referenced PNG in message order. Throws IoError.
void export_jsonl(std::span<const DistillSample> samples, const std::filesystem::path& path);
/// Inverse of export_jsonl. Verifies every image hash; throws DataFormatError
/// on mismatch and IoError on unreadable files.
std::vector<DistillSample> import_jsonl(const std::filesystem::path& path);

}  // namespace clickbench
