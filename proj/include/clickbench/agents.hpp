#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include <json.hpp>

#include "clickbench/protocol.hpp"

namespace clickbench {

enum class SubStep { Reasoning, Action };

/// Ground truth the runner exposes to scripted agents. Remote agents ignore
/// it; they only see the messages.
struct StepContext {
  SubStep sub_step = SubStep::Reasoning;
  int step_index = 0;
  CursorState cursor;
  BoundingBox target_bbox;
  std::string target_text;
};

struct EpisodeContext {
  std::string task_id;
  std::size_t task_index = 0;
  std::size_t repetition = 0;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual void begin_episode(const EpisodeContext&) {}
  /// Called once per sub-step with the full prompt for that sub-step.
  virtual std::string respond(std::span<const Message> messages, const StepContext& ctx) = 0;
};

/// Creates one agent per episode so episodes can run concurrently.
using AgentFactory = std::function<std::unique_ptr<Agent>()>;

/// Privileged oracle: clicks when the cursor is on the target, otherwise
/// moves to the (rounded) target center.
std::unique_ptr<Agent> make_oracle_agent();

/// Open-loop agent: step 0 moves to center + N(0, sigma^2) per axis, every
/// later step clicks.
std::unique_ptr<Agent> make_noisy_oracle_agent(double sigma, std::uint64_t seed);

/// Closed-loop agent: noisy first move as above, then re-moves to the exact
/// center while off target, and clicks once on it.
std::unique_ptr<Agent> make_correcting_oracle_agent(double sigma, std::uint64_t seed);

/// Clicks on step 0 without moving.
std::unique_ptr<Agent> make_premature_clicker_agent();

/// Noise of the noisy/correcting agents for one episode:
///   Rng rng(mix64(derive_seed(seed, task_index, repetition) ^ kNoiseSalt));
///   dx = sigma * rng.normal(); dy = sigma * rng.normal();
/// and the first move is round_half_up(center + (dx, dy)).
inline constexpr std::uint64_t kNoiseSalt = 0x6E6F697365ULL;  // "noise"
MouseMove noisy_first_move(const BoundingBox& target, double sigma, std::uint64_t seed, std::size_t task_index,
                           std::size_t repetition);

MouseMove center_move(const BoundingBox& target);

/// Think-block text a privileged agent writes for a (cursor, target) pair.
std::string oracle_reasoning(CursorState cursor, const BoundingBox& target, const std::string& target_text);

struct RemoteEndpointConfig {
  /// scheme://host[:port]
  std::string base_url;
  std::string path = "/v1/chat/completions";
  std::string model;
  double timeout_seconds = 120.0;
  int max_tokens = 1024;
  double temperature = 0.0;
  std::string api_key;

  void validate() const;
  /// Reads a JSON object with the field names above.
  static RemoteEndpointConfig from_json(const nlohmann::json& j);
  /// CLICKBENCH_REMOTE_URL, CLICKBENCH_REMOTE_PATH, CLICKBENCH_REMOTE_MODEL,
  /// CLICKBENCH_REMOTE_API_KEY, CLICKBENCH_REMOTE_TIMEOUT override `base`.
  static RemoteEndpointConfig from_env(RemoteEndpointConfig base);
  static RemoteEndpointConfig from_env();
};

/// Chat request body: {model, messages:[{role, content:[{type:"text", text} |
/// {type:"image", media_type:"image/png", data:<base64 PNG>}]}], temperature,
/// max_tokens}.
nlohmann::json build_chat_request(const RemoteEndpointConfig& config, std::span<const Message> messages);

/// Text of choices[0].message.content (string, or the concatenated text
/// parts of an array). Throws InfraFailure(EmptyReply) or
/// InfraFailure(ProtocolError).
std::string parse_chat_reply(const std::string& body);

/// Sends one HTTP request per sub-step. Transport problems surface as
/// InfraFailure (Timeout, HttpError, EmptyReply).
std::unique_ptr<Agent> make_remote_vlm_agent(RemoteEndpointConfig config);

}  // namespace clickbench
