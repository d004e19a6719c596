#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clickbench/env.hpp"

namespace clickbench {

enum class Formulation { Simplified, HumanLike };

struct RunConfig {
  bool trace_visible = false;
  bool guidance_present = true;
  Formulation formulation = Formulation::Simplified;
  int step_quota = 5;
  int repetitions = 5;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

std::string_view to_string(Formulation f);
const std::string& formulation_text(const TaskSpec& task, Formulation f);

enum class Role { System, User, Assistant };
std::string_view to_string(Role r);

struct TextPart {
  std::string text;
  bool operator==(const TextPart&) const = default;
};

/// Screenshot attached to a message. The raster is immutable and shared;
/// PNG bytes are produced on serialization.
struct ImagePart {
  std::shared_ptr<const Raster> raster;
  bool operator==(const ImagePart& other) const;
};

using ContentPart = std::variant<TextPart, ImagePart>;

struct Message {
  Role role = Role::User;
  std::vector<ContentPart> parts;

  static Message text(Role role, std::string body);
  /// Text parts joined with "\n"; images omitted.
  std::string text_content() const;
  std::size_t image_count() const;
  bool operator==(const Message&) const = default;
};

/// Human-readable dump of a message list, images shown as
/// "<image WxH sha256:...>". Used for diffs and logs.
std::string render_transcript(std::span<const Message> messages);

enum class ParseError { NoThinkBlock, NoActionCell, UnknownMethod, MalformedArguments, MultipleActions, EmptyCell };

std::string_view to_string(ParseError e);
std::optional<ParseError> parse_error_from_string(std::string_view name);
/// Distinct agent-facing message for each variant (from the prompt resource).
const std::string& feedback_text(ParseError e);

template <typename T>
using Parsed = std::variant<T, ParseError>;

template <typename T>
bool parsed_ok(const Parsed<T>& p) {
  return std::holds_alternative<T>(p);
}

/// Content of the first <think>...</think> block, trimmed.
Parsed<std::string> parse_think(std::string_view reply);
/// Raw content of the first <ipython_cell>...</ipython_cell> block.
std::optional<std::string> extract_action_cell(std::string_view reply);
/// Parses the first cell against
///   call := "mouse_move" "(" number "," number ")" | "mouse_click" "(" ")"
/// allowing whitespace, '#' comments, and integer or decimal literals.
/// Exactly one call is accepted; decimals are rounded half-up.
Parsed<Action> parse_action_cell(std::string_view reply);
/// "<ipython_cell>" + to_call_text(action) + "</ipython_cell>"
std::string serialize_action_cell(const Action& action);

/// One executed interaction step.
struct AgentTurn {
  std::string reasoning_reply;
  std::string reasoning_text;
  /// Empty when the action sub-step did not run.
  std::string action_reply;
  std::string action_raw;
  Parsed<Action> action = ParseError::NoActionCell;
  /// stdout/stderr text returned to the agent after this step.
  std::string console_output;

  bool operator==(const AgentTurn&) const = default;
};

/// Text caption plus the screenshot (cursor already composited).
Message observation_message(std::shared_ptr<const Raster> observation);

/// Reasoning sub-step prompt:
///   system preamble
///   user: task formulation [+ guidance block]
///   [trace visible] per prior turn: assistant think, assistant cell,
///                   user console output (text only)
///   user: observation
///   user: reasoning instruction
std::vector<Message> build_reasoning_prompt(const TaskSpec& task, const RunConfig& config,
                                            const Message& observation, std::span<const AgentTurn> trace);
std::vector<Message> build_reasoning_prompt(const TaskSpec& task, const RunConfig& config,
                                            std::shared_ptr<const Raster> observation,
                                            std::span<const AgentTurn> trace);

/// Appends the reasoning reply and the single-call action instruction.
std::vector<Message> build_action_prompt(std::vector<Message> prior, const std::string& reasoning_reply);

struct ExecutionOutcome {
  std::optional<ParseError> error;
  std::optional<Action> action;
  /// Requested move coordinates before clamping.
  std::optional<MouseMove> requested;
  bool clamped = false;
  CursorState cursor;
  bool terminated = false;
  Viewport viewport;
  /// Set when the step failed outside the parser (e.g. backend errors).
  std::string execution_error;
};

std::string console_text(const ExecutionOutcome& outcome);

/// User message with the console sections, followed by the fresh screenshot
/// for non-terminal steps.
Message build_feedback(const ExecutionOutcome& outcome, std::shared_ptr<const Raster> next_observation);

}  // namespace clickbench
