#include "clickbench/runner.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

#include "clickbench/error.hpp"
#include "clickbench/json_io.hpp"
#include "clickbench/rng.hpp"

namespace clickbench {
namespace {

std::string turn_action_raw(const std::string& reply) {
  auto cell = extract_action_cell(reply);
  return cell ? *cell : reply;
}

/// Writes records in work-item order while items finish out of order.
class OrderedJsonlWriter {
 public:
  OrderedJsonlWriter(std::optional<std::filesystem::path> path, std::size_t total)
      : done_(total, false), lines_(total) {
    if (path) {
      out_.open(*path, std::ios::binary | std::ios::trunc);
      if (!out_) throw Error(Errc::IoError, "cannot open " + path->string());
    }
  }

  void complete(std::size_t index, std::string line) {
    std::lock_guard lock(mutex_);
    lines_[index] = std::move(line);
    done_[index] = true;
    while (next_ < done_.size() && done_[next_]) {
      if (out_.is_open()) {
        out_ << lines_[next_] << '\n';
        out_.flush();
      }
      lines_[next_].clear();
      ++next_;
    }
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
  std::vector<bool> done_;
  std::vector<std::string> lines_;
  std::size_t next_ = 0;
};

}  // namespace

std::size_t BenchmarkResult::n_infra_failures() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const EpisodeRecord& r) { return r.infra_failure; }));
}

EpisodeRecord run_episode(PageBackend& backend, Agent& agent, const TaskSpec& task, const RunConfig& config,
                          CursorState initial_cursor, const EpisodeContext& episode, const StepObserver& observer) {
  config.validate();
  const Viewport viewport = backend.viewport();

  EpisodeRecord rec;
  rec.task_id = task.task_id;
  rec.task_index = episode.task_index;
  rec.repetition = episode.repetition;
  rec.config = config;
  rec.target_bbox = task.target_bbox;
  rec.initial_cursor = initial_cursor;

  EnvState state;
  state.cursor = initial_cursor;

  bool saw_action = false;
  try {
    backend.load(task);
    state.screenshot = backend.screenshot();
    agent.begin_episode(episode);

    while (!state.terminated && state.step_index < config.step_quota) {
      const int step = state.step_index;
      auto observation = std::make_shared<const Raster>(composite_cursor(*state.screenshot, state.cursor));

      StepContext ctx;
      ctx.step_index = step;
      ctx.cursor = state.cursor;
      ctx.target_bbox = task.target_bbox;
      ctx.target_text = task.target_text;

      AgentTurn turn;
      const auto reasoning_prompt = build_reasoning_prompt(task, config, observation, rec.turns);
      ctx.sub_step = SubStep::Reasoning;
      turn.reasoning_reply = agent.respond(reasoning_prompt, ctx);

      ExecutionOutcome outcome;
      outcome.viewport = viewport;
      outcome.cursor = state.cursor;

      auto think = parse_think(turn.reasoning_reply);
      if (!parsed_ok(think)) {
        turn.action = std::get<ParseError>(think);
      } else {
        turn.reasoning_text = std::get<std::string>(think);
        const auto action_prompt = build_action_prompt(reasoning_prompt, turn.reasoning_reply);
        ctx.sub_step = SubStep::Action;
        turn.action_reply = agent.respond(action_prompt, ctx);
        turn.action_raw = turn_action_raw(turn.action_reply);
        turn.action = parse_action_cell(turn.action_reply);
      }

      if (const auto* err = std::get_if<ParseError>(&turn.action)) {
        outcome.error = *err;
        ++state.step_index;
      } else {
        const Action action = std::get<Action>(turn.action);
        outcome.action = action;
        if (const auto* m = std::get_if<MouseMove>(&action)) {
          outcome.requested = *m;
          outcome.clamped = clamp_to_viewport(m->x, m->y, viewport).clamped;
        }
        state = apply_action(state, action, viewport);
        outcome.cursor = state.cursor;
        outcome.terminated = state.terminated;
        if (!saw_action) {
          saw_action = true;
          rec.first_move_outside = !is_click(action) && !hit_test(task.target_bbox, state.cursor);
        }
        if (!is_click(action)) {
          rec.moves.push_back(state.cursor);
          state.screenshot = backend.screenshot();
        }
      }

      std::shared_ptr<const Raster> next_obs;
      const bool more = !state.terminated && state.step_index < config.step_quota;
      if (more) next_obs = std::make_shared<const Raster>(composite_cursor(*state.screenshot, state.cursor));
      outcome.terminated = outcome.terminated || !more;
      turn.console_output = build_feedback(outcome, next_obs).text_content();
      rec.turns.push_back(std::move(turn));

      if (observer) observer(StepCapture{step, observation, &reasoning_prompt, &rec.turns.back()});
    }
  } catch (const InfraFailure& e) {
    rec.infra_failure = true;
    rec.infra_error = e.what();
  }

  rec.steps_used = state.step_index;
  rec.click_point = state.click_point;
  rec.success = !rec.infra_failure && state.click_point && hit_test(task.target_bbox, *state.click_point);
  rec.corrected_success = rec.first_move_outside && rec.success;
  return rec;
}

CursorState initial_cursor_for(const RunConfig& config, std::size_t task_index, std::size_t repetition,
                               const Viewport& viewport, const TaskSpec& task, CursorInit mode) {
  if (mode == CursorInit::FromTask && task.suggested_cursor) return *task.suggested_cursor;
  Rng rng(mix64(derive_seed(config.seed, task_index, repetition) ^ kCursorSalt));
  const double x = rng.uniform(0.0, viewport.width - 1.0);
  const double y = rng.uniform(0.0, viewport.height - 1.0);
  return {x, y};
}

BenchmarkResult run_benchmark(const BackendFactory& backends, const AgentFactory& agents,
                              std::span<const TaskSpec> tasks, const RunConfig& config,
                              const BenchmarkOptions& options) {
  config.validate();
  BenchmarkResult result;
  result.n_tasks = tasks.size();

  if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

  // Exclusion pass, one backend, sequential.
  std::vector<std::size_t> admitted;
  {
    auto backend = backends();
    std::ofstream excl;
    if (options.out_dir) {
      excl.open(*options.out_dir / "exclusions.jsonl", std::ios::binary | std::ios::trunc);
      if (!excl) throw Error(Errc::IoError, "cannot write exclusions.jsonl");
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      backend->load(tasks[i]);
      const ExclusionVerdict v = backend->detect_exclusion(tasks[i]);
      if (v == ExclusionVerdict::Ok) {
        admitted.push_back(i);
        continue;
      }
      result.exclusions.emplace_back(tasks[i].task_id, v);
      if (excl.is_open()) {
        excl << nlohmann::json{{"task_id", tasks[i].task_id}, {"verdict", std::string(to_string(v))}}.dump() << '\n';
      }
    }
  }

  const std::size_t reps = static_cast<std::size_t>(config.repetitions);
  const std::size_t total = admitted.size() * reps;
  result.records.resize(total);
  OrderedJsonlWriter writer(options.out_dir ? std::optional(*options.out_dir / "records.jsonl") : std::nullopt, total);

  auto run_item = [&](std::size_t item, PageBackend& backend) {
    const std::size_t task_index = admitted[item / reps];
    const std::size_t rep = item % reps;
    const TaskSpec& task = tasks[task_index];
    auto agent = agents();
    const CursorState start =
        initial_cursor_for(config, task_index, rep, backend.viewport(), task, options.cursor_init);
    EpisodeRecord rec = run_episode(backend, *agent, task, config, start, {task.task_id, task_index, rep});
    writer.complete(item, nlohmann::json(rec).dump());
    result.records[item] = std::move(rec);
  };

  if (options.execution == Execution::Serial) {
    auto backend = backends();
    for (std::size_t item = 0; item < total; ++item) run_item(item, *backend);
    return result;
  }

  std::exception_ptr failure;
#pragma omp parallel
  {
    std::unique_ptr<PageBackend> backend;
    try {
      backend = backends();
    } catch (...) {
#pragma omp critical(clickbench_runner_failure)
      if (!failure) failure = std::current_exception();
    }
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t item = 0; item < static_cast<std::ptrdiff_t>(total); ++item) {
      if (!backend) continue;
      try {
        run_item(static_cast<std::size_t>(item), *backend);
      } catch (...) {
#pragma omp critical(clickbench_runner_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace clickbench
