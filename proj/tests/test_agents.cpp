#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "clickbench/agents.hpp"
#include "clickbench/metrics.hpp"
#include "clickbench/runner.hpp"
#include "test_support.hpp"

using namespace clickbench;
using namespace clickbench::testing;

namespace {

StepContext ctx_at(SubStep s, int step, CursorState cursor, BoundingBox box = {100, 100, 50, 20}) {
  return StepContext{s, step, cursor, box, "Target"};
}

std::pair<std::string, std::string> two_substeps(Agent& agent, int step, CursorState cursor,
                                                 BoundingBox box = {100, 100, 50, 20}) {
  const std::vector<Message> none;
  auto r = agent.respond(none, ctx_at(SubStep::Reasoning, step, cursor, box));
  auto a = agent.respond(none, ctx_at(SubStep::Action, step, cursor, box));
  return {r, a};
}

}  // namespace

TEST_SUITE("agents") {
  TEST_CASE("oracle decisions") {
    auto agent = make_oracle_agent();
    auto [r1, a1] = two_substeps(*agent, 0, {125, 110});
    CHECK(parsed_ok(parse_think(r1)));
    CHECK(a1 == "<ipython_cell>mouse_click()</ipython_cell>");
    auto [r2, a2] = two_substeps(*agent, 0, {0, 0});
    CHECK(parsed_ok(parse_think(r2)));
    CHECK(a2 == "<ipython_cell>mouse_move(125, 110)</ipython_cell>");
    CHECK(std::get<std::string>(parse_think(r2)).find("(125, 110)") != std::string::npos);
  }

  TEST_CASE("oracle moves to the rounded center of odd boxes") {
    CHECK(center_move({10, 10, 5, 3}) == MouseMove{13, 12});
    auto agent = make_oracle_agent();
    auto [r, a] = two_substeps(*agent, 0, {0, 0}, {10, 10, 5, 3});
    CHECK(a == "<ipython_cell>mouse_move(13, 12)</ipython_cell>");
  }

  TEST_CASE("noisy oracle: first move noisy, then click") {
    auto agent = make_noisy_oracle_agent(30.0, 77);
    agent->begin_episode({"t", 4, 2});
    auto [r0, a0] = two_substeps(*agent, 0, {0, 0});
    const auto expected = noisy_first_move({100, 100, 50, 20}, 30.0, 77, 4, 2);
    CHECK(a0 == serialize_action_cell(expected));
    auto [r1, a1] = two_substeps(*agent, 1, {double(expected.x), double(expected.y)});
    CHECK(a1 == "<ipython_cell>mouse_click()</ipython_cell>");
  }

  TEST_CASE("noise stream matches the documented algorithm") {
    const BoundingBox box{200, 300, 100, 40};
    for (std::uint64_t task = 0; task < 50; ++task) {
      for (std::uint64_t rep = 0; rep < 5; ++rep) {
        const auto d = reference_noise(7.5, 1234, task, rep);
        const auto m = noisy_first_move(box, 7.5, 1234, task, rep);
        CHECK(m.x == int(std::floor(250 + d.dx + 0.5)));
        CHECK(m.y == int(std::floor(320 + d.dy + 0.5)));
      }
    }
  }

  TEST_CASE("sigma 0 behaves like the oracle") {
    const auto tasks = fixed_target_tasks(30, 100, 40, 5);
    RunConfig config;
    config.step_quota = 3;
    config.repetitions = 3;
    config.seed = 9;
    const auto result = run_benchmark(synthetic_backend_factory(), [] { return make_noisy_oracle_agent(0.0, 9); },
                                      tasks, config);
    for (const auto& r : result.records) CHECK(r.success);
  }

  TEST_CASE("noisy oracle success equals the Monte-Carlo oracle with the same stream") {
    const auto tasks = fixed_target_tasks(100, 60, 20, 6);
    RunConfig config;
    config.step_quota = 3;
    config.repetitions = 5;
    config.seed = 31;
    const double sigma = 25.0;
    const auto result = run_benchmark(synthetic_backend_factory(), [&] { return make_noisy_oracle_agent(sigma, 31); },
                                      tasks, config);
    std::size_t measured = 0, simulated = 0;
    for (const auto& r : result.records) {
      measured += r.success ? 1 : 0;
      const bool hit = noisy_point_hits(r.target_bbox, reference_noise(sigma, 31, r.task_index, r.repetition));
      simulated += hit ? 1 : 0;
      CHECK(r.success == hit);
    }
    CHECK(measured == simulated);
    CHECK(measured > 0);
    CHECK(measured < result.records.size());
  }

  TEST_CASE("noisy oracle success agrees with numeric integration") {
    const double sigma = 20.0;
    const auto tasks = fixed_target_tasks(400, 60, 24, 7);
    RunConfig config;
    config.step_quota = 2;
    config.repetitions = 5;
    config.seed = 5;
    const auto result = run_benchmark(synthetic_backend_factory(), [&] { return make_noisy_oracle_agent(sigma, 5); },
                                      tasks, config);
    const auto est = success_rate_ci(result.records);

    // Integrate the Gaussian density over the rounding cell of each axis.
    using boost::math::quadrature::gauss_kronrod;
    const boost::math::normal_distribution<double> nd(0.0, sigma);
    auto density = [&](double t) { return boost::math::pdf(nd, t); };
    const BoundingBox b = tasks[0].target_bbox;
    const double px = gauss_kronrod<double, 61>::integrate(density, -b.w / 2 - 0.5, b.w / 2 - 0.5, 8, 1e-12);
    const double py = gauss_kronrod<double, 61>::integrate(density, -b.h / 2 - 0.5, b.h / 2 - 0.5, 8, 1e-12);
    const double p = px * py;
    CHECK(p == doctest::Approx(analytic_hit_probability(b, sigma)).epsilon(1e-9));
    const double se = std::sqrt(p * (1 - p) / double(est.n));
    CHECK(std::abs(est.rate - p) < 4.0 * se);
  }

  TEST_CASE("correcting oracle re-moves then clicks") {
    auto agent = make_correcting_oracle_agent(200.0, 3);
    agent->begin_episode({"t", 0, 0});
    auto [r0, a0] = two_substeps(*agent, 0, {0, 0});
    CHECK(a0.find("mouse_move(") != std::string::npos);
    auto [r1, a1] = two_substeps(*agent, 1, {900, 700});
    CHECK(a1 == "<ipython_cell>mouse_move(125, 110)</ipython_cell>");
    auto [r2, a2] = two_substeps(*agent, 2, {125, 110});
    CHECK(a2 == "<ipython_cell>mouse_click()</ipython_cell>");
  }

  TEST_CASE("premature clicker always clicks") {
    auto agent = make_premature_clicker_agent();
    auto [r, a] = two_substeps(*agent, 0, {0, 0});
    CHECK(parsed_ok(parse_think(r)));
    CHECK(a == "<ipython_cell>mouse_click()</ipython_cell>");
  }

  TEST_CASE("premature clicker success equals the fraction of tasks starting on target") {
    GenSpec spec;
    spec.seed = 12;
    spec.cursor_distance = {0, 60};
    std::vector<TaskSpec> tasks;
    std::size_t inside = 0;
    for (const auto& g : generate_tasks(spec, 300)) {
      tasks.push_back(g.task);
      inside += hit_test(g.task.target_bbox, g.initial_cursor) ? 1 : 0;
    }
    RunConfig config;
    config.repetitions = 1;
    BenchmarkOptions options;
    options.cursor_init = CursorInit::FromTask;
    const auto result =
        run_benchmark(synthetic_backend_factory(), [] { return make_premature_clicker_agent(); }, tasks, config, options);
    std::size_t successes = 0;
    for (const auto& r : result.records) {
      successes += r.success ? 1 : 0;
      CHECK(r.steps_used == 1);
    }
    CHECK(successes == inside);
    CHECK(inside > 0);
    CHECK(inside < tasks.size());
  }

  TEST_CASE("scripted agents are deterministic") {
    for (int k = 0; k < 2; ++k) {
      auto a = make_correcting_oracle_agent(15.0, 8);
      auto b = make_correcting_oracle_agent(15.0, 8);
      a->begin_episode({"x", 3, 1});
      b->begin_episode({"x", 3, 1});
      for (int step = 0; step < 3; ++step) CHECK(two_substeps(*a, step, {5, 5}) == two_substeps(*b, step, {5, 5}));
    }
  }
}
