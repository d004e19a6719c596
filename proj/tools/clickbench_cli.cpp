#include <CLI11.hpp>
#include <fstream>
#include <set>
#include <iostream>
#include <json.hpp>

#include "clickbench/cdp.hpp"
#include "clickbench/distill.hpp"
#include "clickbench/error.hpp"
#include "clickbench/json_io.hpp"
#include "clickbench/metrics.hpp"
#include "clickbench/runner.hpp"
#include "clickbench/synthetic.hpp"

using namespace clickbench;

namespace {

struct AgentOptions {
  std::string name = "oracle";
  double sigma = 5.0;
  std::uint64_t seed = 0;
  std::string remote_config;
};

AgentFactory make_agent_factory(const AgentOptions& o) {
  if (o.name == "oracle") return [] { return make_oracle_agent(); };
  if (o.name == "noisy") return [o] { return make_noisy_oracle_agent(o.sigma, o.seed); };
  if (o.name == "correcting") return [o] { return make_correcting_oracle_agent(o.sigma, o.seed); };
  if (o.name == "premature") return [] { return make_premature_clicker_agent(); };
  if (o.name == "remote") {
    RemoteEndpointConfig config;
    if (!o.remote_config.empty()) {
      std::ifstream f(o.remote_config);
      if (!f) throw Error(Errc::IoError, "cannot read " + o.remote_config);
      config = RemoteEndpointConfig::from_json(nlohmann::json::parse(f));
    }
    config = RemoteEndpointConfig::from_env(config);
    config.validate();
    return [config] { return make_remote_vlm_agent(config); };
  }
  throw Error(Errc::InvalidArguments, "unknown agent: " + o.name);
}

Viewport parse_viewport(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw Error(Errc::InvalidArguments, "viewport must be WIDTHxHEIGHT");
  return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

bool on_off(const std::string& s) { return s == "on"; }

void add_gen_options(CLI::App* cmd, GenSpec& gen, std::string& viewport, std::string& overlap) {
  cmd->add_option("--seed", gen.seed, "Generator seed");
  cmd->add_option("--viewport", viewport, "WIDTHxHEIGHT")->capture_default_str();
  cmd->add_option("--elements-min", gen.element_count.min)->capture_default_str();
  cmd->add_option("--elements-max", gen.element_count.max)->capture_default_str();
  cmd->add_option("--cursor-min", gen.cursor_distance.min, "Minimum cursor-to-target distance")->capture_default_str();
  cmd->add_option("--cursor-max", gen.cursor_distance.max, "Maximum cursor-to-target distance")->capture_default_str();
  cmd->add_option("--overlap", overlap)->check(CLI::IsMember({"avoid", "allow_off_center"}))->capture_default_str();
}

void finish_gen(GenSpec& gen, const std::string& viewport, const std::string& overlap) {
  gen.viewport = parse_viewport(viewport);
  gen.overlap = overlap == "avoid" ? OverlapPolicy::Avoid : OverlapPolicy::AllowOffCenter;
  gen.validate();
}

std::vector<TaskSpec> tasks_of(const std::vector<GeneratedTask>& generated) {
  std::vector<TaskSpec> out;
  out.reserve(generated.size());
  for (const auto& g : generated) out.push_back(g.task);
  return out;
}

struct BackendOptions {
  std::string name = "synthetic";
  std::string cdp_endpoint;
  std::string viewport = "1280x800";
  double dpr = 1.0;
};

struct BackendHandle {
  BackendFactory factory;
  std::unique_ptr<BrowserProcess> browser;
};

BackendHandle make_backend(const BackendOptions& o) {
  BackendHandle h;
  const Viewport vp = parse_viewport(o.viewport);
  if (o.name == "synthetic") {
    h.factory = synthetic_backend_factory(vp);
    return h;
  }
  std::string endpoint = o.cdp_endpoint;
  if (endpoint.empty()) {
    const auto exe = find_browser();
    if (!exe) throw Error(Errc::ConnectFailed, "no --cdp-endpoint given and no browser found (set CLICKBENCH_CHROME)");
    h.browser = BrowserProcess::launch(*exe);
    endpoint = h.browser->endpoint();
  }
  CdpOptions options;
  options.viewport = vp;
  options.device_pixel_ratio = o.dpr;
  h.factory = cdp_backend_factory(endpoint, options);
  return h;
}

ReportFormat report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "md") return ReportFormat::Markdown;
  return ReportFormat::Both;
}

std::size_t count_lines(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return 0;
  return read_jsonl(path).size();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cursor-grounded click benchmark harness"};
  app.require_subcommand(1);

  // gen-tasks
  GenSpec gen_spec;
  std::string gen_viewport = "1280x800";
  std::string gen_overlap = "avoid";
  std::size_t gen_count = 200;
  std::string gen_out = "tasks.jsonl";
  auto* gen_cmd = app.add_subcommand("gen-tasks", "Generate a synthetic task manifest");
  add_gen_options(gen_cmd, gen_spec, gen_viewport, gen_overlap);
  gen_cmd->add_option("--count", gen_count)->capture_default_str();
  gen_cmd->add_option("--out", gen_out)->capture_default_str();

  // run
  std::string run_tasks;
  BackendOptions run_backend;
  AgentOptions run_agent;
  std::string run_trace = "off";
  std::string run_guidance = "on";
  std::string run_formulation = "simplified";
  RunConfig run_config;
  std::string run_out = "out";
  std::string run_cursor_init = "uniform";
  std::string run_format = "both";
  bool run_serial = false;
  auto* run_cmd = app.add_subcommand("run", "Run a benchmark configuration");
  run_cmd->add_option("--tasks", run_tasks, "Task manifest (JSONL)")->required();
  run_cmd->add_option("--backend", run_backend.name)->check(CLI::IsMember({"synthetic", "cdp"}))->capture_default_str();
  run_cmd->add_option("--cdp-endpoint", run_backend.cdp_endpoint, "ws:// or http:// DevTools endpoint");
  run_cmd->add_option("--viewport", run_backend.viewport)->capture_default_str();
  run_cmd->add_option("--dpr", run_backend.dpr, "Device pixel ratio for the cdp backend")->capture_default_str();
  run_cmd->add_option("--agent", run_agent.name)
      ->check(CLI::IsMember({"oracle", "noisy", "correcting", "premature", "remote"}))
      ->capture_default_str();
  run_cmd->add_option("--sigma", run_agent.sigma, "Noise of noisy/correcting agents (px)")->capture_default_str();
  run_cmd->add_option("--remote-config", run_agent.remote_config, "JSON endpoint config for --agent remote");
  run_cmd->add_option("--trace", run_trace)->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  run_cmd->add_option("--guidance", run_guidance)->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  run_cmd->add_option("--formulation", run_formulation)
      ->check(CLI::IsMember({"simplified", "humanlike"}))
      ->capture_default_str();
  run_cmd->add_option("--quota", run_config.step_quota)->capture_default_str();
  run_cmd->add_option("--reps", run_config.repetitions)->capture_default_str();
  run_cmd->add_option("--seed", run_config.seed)->capture_default_str();
  run_cmd->add_option("--cursor-init", run_cursor_init)->check(CLI::IsMember({"uniform", "task"}))->capture_default_str();
  run_cmd->add_option("--format", run_format)->check(CLI::IsMember({"csv", "md", "both"}))->capture_default_str();
  run_cmd->add_option("--out", run_out)->capture_default_str();
  run_cmd->add_flag("--serial", run_serial, "Run episodes sequentially");

  // report
  std::vector<std::string> report_records;
  std::vector<std::string> report_exclusions;
  std::size_t report_n_tasks = 0;
  std::string report_out = "report";
  std::string report_format_name = "both";
  auto* report_cmd = app.add_subcommand("report", "Aggregate records.jsonl files into tables");
  report_cmd->add_option("--records", report_records)->required();
  report_cmd->add_option("--exclusions", report_exclusions, "exclusions.jsonl files");
  report_cmd->add_option("--n-tasks", report_n_tasks, "Task count (defaults to distinct task ids + exclusions)");
  report_cmd->add_option("--format", report_format_name)->check(CLI::IsMember({"csv", "md", "both"}))->capture_default_str();
  report_cmd->add_option("--out", report_out)->capture_default_str();

  // distill-export
  GenSpec dist_gen;
  std::string dist_viewport = "1280x800";
  std::string dist_overlap = "avoid";
  int dist_stage = 1;
  std::size_t dist_count = 1000;
  double dist_click_fraction = 0.5;
  bool dist_raw_distance = false;
  std::string dist_formulation = "simplified";
  std::string dist_tasks;
  AgentOptions dist_agent;
  int dist_quota = 5;
  std::string dist_out = "distill/stage1.jsonl";
  auto* dist_cmd = app.add_subcommand("distill-export", "Export Stage-1 or Stage-2 distillation samples");
  add_gen_options(dist_cmd, dist_gen, dist_viewport, dist_overlap);
  dist_cmd->add_option("--stage", dist_stage)->check(CLI::IsMember({1, 2}))->capture_default_str();
  dist_cmd->add_option("--count", dist_count, "Stage-1 samples, or generated Stage-2 tasks")->capture_default_str();
  dist_cmd->add_option("--click-fraction", dist_click_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  dist_cmd->add_flag("--raw-distance", dist_raw_distance, "Stage 1: place cursors by distance only");
  dist_cmd->add_option("--formulation", dist_formulation)
      ->check(CLI::IsMember({"simplified", "humanlike"}))
      ->capture_default_str();
  dist_cmd->add_option("--tasks", dist_tasks, "Stage 2: task manifest (default: generate --count tasks)");
  dist_cmd->add_option("--agent", dist_agent.name, "Stage 2 teacher")
      ->check(CLI::IsMember({"oracle", "correcting", "remote"}))
      ->capture_default_str();
  dist_cmd->add_option("--remote-config", dist_agent.remote_config);
  dist_cmd->add_option("--quota", dist_quota)->capture_default_str();
  dist_cmd->add_option("--out", dist_out)->capture_default_str();

  // move-or-click
  std::string moc_samples;
  std::vector<std::string> moc_agents{"oracle"};
  std::string moc_out = "report";
  auto* moc_cmd = app.add_subcommand("move-or-click", "Score agents on Stage-1 samples (move vs click)");
  moc_cmd->add_option("--samples", moc_samples, "Stage-1 JSONL")->required();
  moc_cmd->add_option("--agents", moc_agents)->check(CLI::IsMember({"oracle", "premature"}))->capture_default_str();
  moc_cmd->add_option("--out", moc_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      finish_gen(gen_spec, gen_viewport, gen_overlap);
      const auto tasks = tasks_of(generate_tasks(gen_spec, gen_count));
      write_task_manifest(gen_out, tasks);
      std::cout << "wrote " << tasks.size() << " tasks to " << gen_out << "\n";
      return 0;
    }

    if (*run_cmd) {
      run_config.trace_visible = on_off(run_trace);
      run_config.guidance_present = on_off(run_guidance);
      run_config.formulation = formulation_from_string(run_formulation);
      run_config.validate();
      run_agent.seed = run_config.seed;
      const auto tasks = read_task_manifest(run_tasks);
      auto backend = make_backend(run_backend);
      BenchmarkOptions options;
      options.cursor_init = run_cursor_init == "task" ? CursorInit::FromTask : CursorInit::Uniform;
      options.execution = run_serial ? Execution::Serial : Execution::Parallel;
      options.out_dir = run_out;
      const auto result = run_benchmark(backend.factory, make_agent_factory(run_agent), tasks, run_config, options);
      const auto report = summarize(result.records, result.n_tasks, result.n_excluded());
      emit_report(report, result.records, run_out, report_format(run_format));
      std::cout << "tasks " << result.n_tasks << ", excluded " << result.n_excluded() << ", episodes "
                << result.records.size() << ", infra failures " << result.n_infra_failures() << "\n";
      std::cout << "success rate " << format_fixed(report.success_rate, 4) << " ± "
                << format_fixed(report.success_ci_halfwidth, 4) << "\n";
      if (report.correction) {
        std::cout << "r_corr " << format_fixed(report.correction->r_corr, 4) << " [" << format_fixed(report.correction->ci.lo, 4)
                  << ", " << format_fixed(report.correction->ci.hi, 4) << "] (" << report.correction->numerator << "/"
                  << report.correction->denominator << ")\n";
      } else {
        std::cout << "r_corr undefined (no inaccurate first move)\n";
      }
      if (result.n_infra_failures() > 0) {
        std::cerr << result.n_infra_failures() << " episode(s) failed for infrastructure reasons\n";
        return 3;
      }
      return 0;
    }

    if (*report_cmd) {
      std::vector<EpisodeRecord> records;
      for (const auto& path : report_records) {
        auto more = read_records_jsonl(path);
        std::move(more.begin(), more.end(), std::back_inserter(records));
      }
      std::size_t excluded = 0;
      for (const auto& path : report_exclusions) excluded += count_lines(path);
      std::size_t n_tasks = report_n_tasks;
      if (n_tasks == 0) {
        std::set<std::string> ids;
        for (const auto& r : records) ids.insert(r.task_id);
        n_tasks = ids.size() + excluded;
      }
      const auto report = summarize(records, n_tasks, excluded);
      for (const auto& p : emit_report(report, records, report_out, report_format(report_format_name))) {
        std::cout << p.string() << "\n";
      }
      return 0;
    }

    if (*dist_cmd) {
      finish_gen(dist_gen, dist_viewport, dist_overlap);
      const Formulation formulation = formulation_from_string(dist_formulation);
      std::vector<DistillSample> samples;
      if (dist_stage == 1) {
        Stage1Spec spec{dist_gen, std::nullopt, formulation};
        if (!dist_raw_distance) spec.click_fraction = dist_click_fraction;
        samples = gen_stage1_samples(spec, dist_count);
      } else {
        std::vector<TaskSpec> tasks =
            dist_tasks.empty() ? tasks_of(generate_tasks(dist_gen, dist_count)) : read_task_manifest(dist_tasks);
        dist_agent.seed = dist_gen.seed;
        Stage2Options options;
        options.seed = dist_gen.seed;
        options.formulation = formulation;
        samples = collect_stage2(synthetic_backend_factory(dist_gen.viewport), make_agent_factory(dist_agent), tasks,
                                 dist_quota, options);
      }
      export_jsonl(samples, dist_out);
      std::cout << "wrote " << samples.size() << " samples to " << dist_out << "\n";
      return 0;
    }

    if (*moc_cmd) {
      const auto samples = import_jsonl(moc_samples);
      std::vector<MoveOrClickRow> rows;
      for (const auto& name : moc_agents) {
        AgentOptions o;
        o.name = name;
        const double acc = eval_move_or_click(make_agent_factory(o), samples);
        rows.push_back({name, acc, samples.size()});
        std::cout << name << " " << format_fixed(acc, 4) << "\n";
      }
      emit_move_or_click(rows, moc_out, ReportFormat::Both);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
