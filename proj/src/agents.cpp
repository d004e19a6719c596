#include "clickbench/agents.hpp"

#include "clickbench/prompts.hpp"
#include "clickbench/rng.hpp"

namespace clickbench {
namespace {

std::string think(const std::string& body) { return "<think>" + body + "</think>"; }

/// Shared shape of the scripted agents: decide on the reasoning sub-step,
/// emit the decided call on the action sub-step.
class ScriptedAgent : public Agent {
 public:
  std::string respond(std::span<const Message>, const StepContext& ctx) override {
    if (ctx.sub_step == SubStep::Reasoning) {
      auto [reasoning, action] = decide(ctx);
      pending_ = action;
      return think(reasoning);
    }
    return serialize_action_cell(pending_);
  }

 protected:
  virtual std::pair<std::string, Action> decide(const StepContext& ctx) = 0;

 private:
  Action pending_ = MouseClick{};
};

class OracleAgent final : public ScriptedAgent {
 protected:
  std::pair<std::string, Action> decide(const StepContext& ctx) override {
    const Action a = hit_test(ctx.target_bbox, ctx.cursor) ? Action{MouseClick{}} : Action{center_move(ctx.target_bbox)};
    return {oracle_reasoning(ctx.cursor, ctx.target_bbox, ctx.target_text), a};
  }
};

class NoisyOracleAgent final : public ScriptedAgent {
 public:
  NoisyOracleAgent(double sigma, std::uint64_t seed, bool corrects) : sigma_(sigma), seed_(seed), corrects_(corrects) {}

  void begin_episode(const EpisodeContext& ctx) override { episode_ = ctx; }

 protected:
  std::pair<std::string, Action> decide(const StepContext& ctx) override {
    if (ctx.step_index == 0) {
      const MouseMove m = noisy_first_move(ctx.target_bbox, sigma_, seed_, episode_.task_index, episode_.repetition);
      return {"Moving to the target \"" + ctx.target_text + "\".", Action{m}};
    }
    if (!corrects_) return {prompts().scripted_reasoning_blind, Action{MouseClick{}}};
    const Action a = hit_test(ctx.target_bbox, ctx.cursor) ? Action{MouseClick{}} : Action{center_move(ctx.target_bbox)};
    return {oracle_reasoning(ctx.cursor, ctx.target_bbox, ctx.target_text), a};
  }

 private:
  double sigma_;
  std::uint64_t seed_;
  bool corrects_;
  EpisodeContext episode_;
};

class PrematureClickerAgent final : public ScriptedAgent {
 protected:
  std::pair<std::string, Action> decide(const StepContext&) override {
    return {prompts().scripted_reasoning_blind, Action{MouseClick{}}};
  }
};

}  // namespace

MouseMove center_move(const BoundingBox& target) {
  const Point c = target.center();
  return {round_half_up(c.x), round_half_up(c.y)};
}

MouseMove noisy_first_move(const BoundingBox& target, double sigma, std::uint64_t seed, std::size_t task_index,
                           std::size_t repetition) {
  Rng rng(mix64(derive_seed(seed, task_index, repetition) ^ kNoiseSalt));
  const double dx = sigma * rng.normal();
  const double dy = sigma * rng.normal();
  const Point c = target.center();
  return {round_half_up(c.x + dx), round_half_up(c.y + dy)};
}

std::string oracle_reasoning(CursorState cursor, const BoundingBox& target, const std::string& target_text) {
  const auto& p = prompts();
  const TemplateVars common = {
      {"text", target_text},
      {"x0", format_coord(target.x)},
      {"x1", format_coord(target.x + target.w)},
      {"y0", format_coord(target.y)},
      {"y1", format_coord(target.y + target.h)},
      {"cx", format_coord(cursor.x)},
      {"cy", format_coord(cursor.y)},
  };
  if (hit_test(target, cursor)) return fill_template(p.oracle_reasoning_inside, common);
  const MouseMove m = center_move(target);
  TemplateVars vars = common;
  vars.emplace_back("tx", std::to_string(m.x));
  vars.emplace_back("ty", std::to_string(m.y));
  return fill_template(p.oracle_reasoning_outside, vars);
}

std::unique_ptr<Agent> make_oracle_agent() { return std::make_unique<OracleAgent>(); }

std::unique_ptr<Agent> make_noisy_oracle_agent(double sigma, std::uint64_t seed) {
  return std::make_unique<NoisyOracleAgent>(sigma, seed, false);
}

std::unique_ptr<Agent> make_correcting_oracle_agent(double sigma, std::uint64_t seed) {
  return std::make_unique<NoisyOracleAgent>(sigma, seed, true);
}

std::unique_ptr<Agent> make_premature_clicker_agent() { return std::make_unique<PrematureClickerAgent>(); }

}  // namespace clickbench
