// Acceptance suite: one PASS/FAIL/SKIP line per acceptance criterion. Exits
// non-zero only when a criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clickbench/cdp.hpp"
#include "clickbench/error.hpp"
#include "clickbench/metrics.hpp"
#include "clickbench/prompts.hpp"
#include "clickbench/runner.hpp"
#include "clickbench/synthetic.hpp"
#include "test_support.hpp"

using namespace clickbench;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
  Outcome outcome = Outcome::Fail;
  std::string detail;
};

Verdict pass_if(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

std::string fmt(double v, int decimals = 4) { return format_fixed(v, decimals); }

std::vector<TaskSpec> synthetic_tasks(std::uint64_t seed, std::size_t n) {
  GenSpec spec;
  spec.seed = seed;
  std::vector<TaskSpec> tasks;
  for (const auto& g : generate_tasks(spec, n)) tasks.push_back(g.task);
  return tasks;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Verdict oracle_closure() {
  const auto start = std::chrono::steady_clock::now();
  const auto tasks = synthetic_tasks(2024, 200);
  RunConfig config;
  config.step_quota = 3;
  config.repetitions = 5;
  config.seed = 2024;
  const auto result = run_benchmark(synthetic_backend_factory(), [] { return make_oracle_agent(); }, tasks, config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto est = success_rate_ci(result.records);
  const bool ok = result.n_excluded() == 0 && est.n == 1000 && est.successes == est.n && seconds < 30.0;
  return pass_if(ok, "success " + std::to_string(est.successes) + "/" + std::to_string(est.n) + " in " +
                         fmt(seconds, 2) + " s");
}

Verdict success_ci() {
  const auto est = success_rate_ci(1978, 2150);
  const bool ok = est.halfwidth >= 0.0110 && est.halfwidth <= 0.0120 && format_fixed(est.halfwidth, 2) == "0.01";
  return pass_if(ok, "halfwidth(1978/2150) = " + fmt(est.halfwidth));
}

Verdict correction_ci() {
  const auto zero = clopper_pearson(0, 180, 0.95);
  const auto mid = clopper_pearson(63, 180, 0.95);
  const bool ok = std::abs(zero.hi - 0.0203) <= 0.0005 && zero.lo == 0.0 && std::abs(mid.lo - 0.281) <= 0.002 &&
                  std::abs(mid.hi - 0.424) <= 0.002;
  return pass_if(ok, "CP(0,180) = [" + fmt(zero.lo) + ", " + fmt(zero.hi) + "], CP(63,180) = [" + fmt(mid.lo) + ", " +
                         fmt(mid.hi) + "]");
}

Verdict correction_semantics() {
  const auto tasks = synthetic_tasks(77, 100);
  RunConfig config;
  config.step_quota = 5;
  config.repetitions = 3;
  config.seed = 77;
  const double sigma = 40.0;
  const auto noisy =
      run_benchmark(synthetic_backend_factory(), [&] { return make_noisy_oracle_agent(sigma, 77); }, tasks, config);
  const auto correcting = run_benchmark(synthetic_backend_factory(),
                                        [&] { return make_correcting_oracle_agent(sigma, 77); }, tasks, config);
  const auto premature =
      run_benchmark(synthetic_backend_factory(), [] { return make_premature_clicker_agent(); }, tasks, config);
  const auto open_loop = correction_rate(noisy.records);
  const auto closed_loop = correction_rate(correcting.records);
  bool empty = false;
  try {
    correction_rate(premature.records);
  } catch (const Error& e) {
    empty = e.code() == Errc::EmptyDenominator;
  }
  const bool ok = open_loop.denominator > 0 && open_loop.r_corr == 0.0 && closed_loop.denominator > 0 &&
                  closed_loop.r_corr == 1.0 && empty;
  return pass_if(ok, "noisy " + std::to_string(open_loop.numerator) + "/" + std::to_string(open_loop.denominator) +
                         ", correcting " + std::to_string(closed_loop.numerator) + "/" +
                         std::to_string(closed_loop.denominator) + ", premature " +
                         (empty ? "EmptyDenominator" : "defined"));
}

Verdict noisy_calibration() {
  const double sigma = 5.0;
  const std::uint64_t seed = 4242;
  const auto tasks = testing::fixed_target_tasks(400, 100, 40, seed);
  RunConfig config;
  config.step_quota = 2;
  config.repetitions = 5;
  config.seed = seed;
  const auto result =
      run_benchmark(synthetic_backend_factory(), [&] { return make_noisy_oracle_agent(sigma, seed); }, tasks, config);
  const auto measured = success_rate_ci(result.records);

  // Monte-Carlo oracle over the same (task, repetition) noise stream.
  std::size_t hits = 0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (std::size_t r = 0; r < 5; ++r) {
      ++n;
      hits += testing::noisy_point_hits(tasks[t].target_bbox, testing::reference_noise(sigma, seed, t, r)) ? 1 : 0;
    }
  }
  const auto ci = clopper_pearson(hits, n, 0.95);
  const double p = measured.rate;
  const bool ok = measured.n == 2000 && p >= ci.lo && p <= ci.hi;
  return pass_if(ok, "measured " + fmt(p) + " (" + std::to_string(measured.successes) + "/2000), Monte-Carlo " +
                         std::to_string(hits) + "/" + std::to_string(n) + " with 95% CI [" + fmt(ci.lo) + ", " +
                         fmt(ci.hi) + "], analytic " + fmt(testing::analytic_hit_probability({0, 0, 100, 40}, sigma)));
}

Verdict parser_suite() {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> coord(-10000, 10000);
  std::size_t round_trips = 0;
  for (int i = 0; i < 10000; ++i) {
    const Action a = gen() % 4 == 0 ? Action{MouseClick{}} : Action{MouseMove{coord(gen), coord(gen)}};
    const auto parsed = parse_action_cell(serialize_action_cell(a));
    if (parsed_ok(parsed) && std::get<Action>(parsed) == a) ++round_trips;
  }
  auto cell = [](const std::string& body) { return "<ipython_cell>" + body + "</ipython_cell>"; };
  auto err = [](const Parsed<Action>& p) -> std::optional<ParseError> {
    if (parsed_ok(p)) return std::nullopt;
    return std::get<ParseError>(p);
  };
  const auto think = parse_think("<ipython_cell>mouse_click()</ipython_cell>");
  const bool no_think = !parsed_ok(think) && std::get<ParseError>(think) == ParseError::NoThinkBlock;
  const bool fixtures = no_think && err(parse_action_cell("<think>x</think> mouse_click()")) == ParseError::NoActionCell &&
                        err(parse_action_cell(cell("mouse_scroll(0, 5)"))) == ParseError::UnknownMethod &&
                        err(parse_action_cell(cell("mouse_move(5)"))) == ParseError::MalformedArguments &&
                        err(parse_action_cell(cell("  "))) == ParseError::EmptyCell;
  const bool multi = err(parse_action_cell(cell("mouse_move(10, 10)\nmouse_click()"))) == ParseError::MultipleActions;
  return pass_if(round_trips == 10000 && fixtures && multi,
                 std::to_string(round_trips) + "/10000 round-trips, six error fixtures " +
                     (fixtures && multi ? "ok" : "mismatch") + ", multi-call -> " +
                     (multi ? "MultipleActions" : "other"));
}

Verdict prompt_toggles() {
  TaskSpec task;
  task.task_id = "t";
  task.target_bbox = {10, 10, 40, 20};
  task.target_text = "English";
  task.formulation_simplified = "Click on the element that displays English or conveys its meaning.";
  task.formulation_humanlike = "Switch the website's language to English.";
  const auto shot = std::make_shared<const Raster>(32, 20, Rgba{1, 2, 3, 255});
  std::vector<AgentTurn> turns(2);
  for (int i = 0; i < 2; ++i) {
    turns[i].reasoning_reply = "<think>r" + std::to_string(i) + "</think>";
    turns[i].reasoning_text = "r" + std::to_string(i);
    turns[i].action_reply = "<ipython_cell>mouse_move(" + std::to_string(i) + ", 1)</ipython_cell>";
    turns[i].action_raw = "mouse_move(" + std::to_string(i) + ", 1)";
    turns[i].action = MouseMove{i, 1};
    turns[i].console_output = "[stdout]\nmoved";
  }
  bool deterministic = true;
  bool guidance_ok = true;
  bool trace_ok = true;
  for (auto f : {Formulation::Simplified, Formulation::HumanLike}) {
    for (bool trace : {false, true}) {
      for (bool guidance : {false, true}) {
        RunConfig c;
        c.formulation = f;
        c.trace_visible = trace;
        c.guidance_present = guidance;
        deterministic &= render_transcript(build_reasoning_prompt(task, c, shot, turns)) ==
                         render_transcript(build_reasoning_prompt(task, c, shot, turns));
      }
      RunConfig on;
      on.formulation = f;
      on.trace_visible = trace;
      RunConfig off = on;
      off.guidance_present = false;
      std::string with = render_transcript(build_reasoning_prompt(task, on, shot, turns));
      const std::string without = render_transcript(build_reasoning_prompt(task, off, shot, turns));
      const auto& block = prompts().guidance;
      const auto at = with.find(block);
      guidance_ok &= at != std::string::npos && at > 0;
      if (at != std::string::npos && at > 0) with.erase(at - 1, block.size() + 1);
      guidance_ok &= with == without;
    }
    for (bool guidance : {false, true}) {
      RunConfig hidden;
      hidden.formulation = f;
      hidden.guidance_present = guidance;
      RunConfig visible = hidden;
      visible.trace_visible = true;
      const auto h = build_reasoning_prompt(task, hidden, shot, turns);
      const auto v = build_reasoning_prompt(task, visible, shot, turns);
      if (v.size() != h.size() + 6) {
        trace_ok = false;
        continue;
      }
      std::vector<Message> stripped(v.begin(), v.begin() + 2);
      stripped.insert(stripped.end(), v.begin() + 8, v.end());
      trace_ok &= stripped == h;
    }
  }
  return pass_if(deterministic && guidance_ok && trace_ok,
                 std::string("deterministic ") + (deterministic ? "yes" : "no") + ", guidance diff " +
                     (guidance_ok ? "isolated" : "leaks") + ", trace diff " + (trace_ok ? "isolated" : "leaks"));
}

Verdict cdp_integration() {
  const auto exe = find_browser();
  if (!exe) return {Outcome::Skip, "no headless Chromium found (set CLICKBENCH_CHROME)"};
  auto proc = BrowserProcess::launch(*exe);
  CdpOptions options;
  options.viewport = {400, 300};
  CdpBackend backend(proc->endpoint(), options);
  auto task = [](const std::string& file) {
    TaskSpec t;
    t.task_id = file;
    t.page.kind = PageKind::Snapshot;
    t.page.path = (std::filesystem::path(CLICKBENCH_FIXTURES) / file).string();
    t.target_locator = "//*[@id='go']";
    t.target_text = "Continue";
    return t;
  };
  backend.load(task("button.html"));
  const auto box = backend.session().query_xpath_geometry("//*[@id='go']");
  const bool geometry = std::abs(box.x - 100) <= 1 && std::abs(box.y - 100) <= 1 && std::abs(box.w - 50) <= 1 &&
                        std::abs(box.h - 20) <= 1;
  backend.load(task("overlay.html"));
  const auto overlay = backend.detect_exclusion(task("overlay.html"));
  backend.load(task("edited.html"));
  const auto edited = backend.detect_exclusion(task("edited.html"));
  const bool ok = geometry && overlay == ExclusionVerdict::Occluded && edited == ExclusionVerdict::Replaced;
  return pass_if(ok, "button at (" + fmt(box.x, 1) + ", " + fmt(box.y, 1) + ", " + fmt(box.w, 1) + ", " +
                         fmt(box.h, 1) + "), overlay " + std::string(to_string(overlay)) + ", edited " +
                         std::string(to_string(edited)));
}

Verdict replay() {
  const auto tasks = synthetic_tasks(5150, 60);
  RunConfig config;
  config.step_quota = 4;
  config.repetitions = 3;
  config.seed = 5150;
  const auto base = std::filesystem::temp_directory_path() / "clickbench_acceptance_replay";
  std::filesystem::remove_all(base);
  std::vector<std::string> bytes;
  for (const char* run : {"a", "b"}) {
    BenchmarkOptions options;
    options.out_dir = base / run;
    run_benchmark(synthetic_backend_factory(), [] { return make_correcting_oracle_agent(20.0, 5150); }, tasks,
                  config, options);
    bytes.push_back(slurp(*options.out_dir / "records.jsonl"));
  }
  const bool ok = !bytes[0].empty() && bytes[0] == bytes[1];
  return pass_if(ok, std::to_string(bytes[0].size()) + " bytes, " + (ok ? "identical" : "different"));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"oracle-closure", oracle_closure},
      {"success-ci", success_ci},
      {"correction-ci", correction_ci},
      {"correction-semantics", correction_semantics},
      {"noisy-calibration", noisy_calibration},
      {"parser-suite", parser_suite},
      {"prompt-toggles", prompt_toggles},
      {"cdp-integration", cdp_integration},
      {"replay", replay},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Skip ? "SKIP" : "FAIL";
    failures += v.outcome == Outcome::Fail ? 1 : 0;
    std::cout << tag << " " << name << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
