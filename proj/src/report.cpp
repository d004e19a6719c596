#include <cstdio>
#include <fstream>
#include <sstream>

#include "clickbench/error.hpp"
#include "clickbench/metrics.hpp"

namespace clickbench {
namespace {

std::string on_off(bool v, const char* on, const char* off) { return v ? on : off; }

void write_file(const std::filesystem::path& path, const std::string& text, std::vector<std::filesystem::path>& out) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::IoError, "cannot open " + path.string());
  f << text;
  if (!f) throw Error(Errc::IoError, "write failed: " + path.string());
  out.push_back(path);
}

std::string rate_cell(const ConfigMetrics* m) {
  if (!m || m->success.n == 0) return "--";
  return format_fixed(m->success.rate, 2) + " ± " + format_fixed(m->success.halfwidth, 2) +
         " (n=" + std::to_string(m->success.n) + ")";
}

std::string pct(double v) { return format_fixed(100.0 * v, 1) + "%"; }

}  // namespace

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::vector<std::filesystem::path> emit_move_or_click(std::span<const MoveOrClickRow> move_or_click,
                                                      const std::filesystem::path& out_dir, ReportFormat format) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  const bool csv = format != ReportFormat::Markdown;
  const bool md = format != ReportFormat::Csv;
  if (csv) {
    std::ostringstream s;
    s << "model,accuracy,n\n";
    for (const auto& row : move_or_click) s << row.model << "," << format_fixed(row.accuracy, 6) << "," << row.n << "\n";
    write_file(out_dir / "move_or_click.csv", s.str(), written);
  }
  if (md) {
    std::ostringstream s;
    s << "|";
    for (const auto& row : move_or_click) s << " " << row.model << " |";
    s << "\n|";
    for (std::size_t i = 0; i < move_or_click.size(); ++i) s << "---|";
    s << "\n|";
    for (const auto& row : move_or_click) s << " " << format_fixed(row.accuracy, 2) << " |";
    s << "\n";
    write_file(out_dir / "move_or_click.md", s.str(), written);
  }
  return written;
}

std::vector<std::filesystem::path> emit_report(const MetricsReport& report, std::span<const EpisodeRecord> records,
                                               const std::filesystem::path& out_dir, ReportFormat format,
                                               std::span<const MoveOrClickRow> move_or_click) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  const bool csv = format != ReportFormat::Markdown;
  const bool md = format != ReportFormat::Csv;

  if (csv) {
    std::ostringstream s;
    s << "metric,value\n";
    s << "n_tasks," << report.n_tasks << "\n";
    s << "n_excluded," << report.n_excluded << "\n";
    s << "n_episodes," << report.n_episodes << "\n";
    s << "n_infra_failures," << report.n_infra_failures << "\n";
    s << "success_rate," << format_fixed(report.success_rate, 6) << "\n";
    s << "success_ci_halfwidth," << format_fixed(report.success_ci_halfwidth, 6) << "\n";
    if (report.correction) {
      s << "r_corr," << format_fixed(report.correction->r_corr, 6) << "\n";
      s << "r_corr_ci_lo," << format_fixed(report.correction->ci.lo, 6) << "\n";
      s << "r_corr_ci_hi," << format_fixed(report.correction->ci.hi, 6) << "\n";
      s << "r_corr_numerator," << report.correction->numerator << "\n";
      s << "r_corr_denominator," << report.correction->denominator << "\n";
    } else {
      s << "r_corr,undefined\n";
    }
    write_file(out_dir / "summary.csv", s.str(), written);

    std::ostringstream b;
    b << "trace,guidance,formulation,n_episodes,n_infra_failures,successes,n,success_rate,success_ci_halfwidth,"
         "r_corr_numerator,r_corr_denominator,r_corr,r_corr_ci_lo,r_corr_ci_hi\n";
    for (const auto& m : report.breakdown) {
      b << on_off(m.key.trace_visible, "visible", "hidden") << ","
        << on_off(m.key.guidance_present, "present", "absent") << "," << to_string(m.key.formulation) << ","
        << m.n_episodes << "," << m.n_infra_failures << "," << m.success.successes << "," << m.success.n << ","
        << format_fixed(m.success.rate, 6) << "," << format_fixed(m.success.halfwidth, 6) << ",";
      if (m.correction) {
        b << m.correction->numerator << "," << m.correction->denominator << "," << format_fixed(m.correction->r_corr, 6)
          << "," << format_fixed(m.correction->ci.lo, 6) << "," << format_fixed(m.correction->ci.hi, 6) << "\n";
      } else {
        b << ",0,undefined,,\n";
      }
    }
    write_file(out_dir / "breakdown.csv", b.str(), written);

    // Per-task success fraction: data for a score-distribution plot.
    std::map<std::pair<ConfigKey, std::string>, std::pair<std::size_t, std::size_t>> per_task;
    for (const auto& r : records) {
      if (r.infra_failure) continue;
      auto& cell = per_task[{{r.config.trace_visible, r.config.guidance_present, r.config.formulation}, r.task_id}];
      ++cell.first;
      cell.second += r.success ? 1 : 0;
    }
    std::ostringstream d;
    d << "trace,guidance,formulation,task_id,episodes,successes,success_fraction\n";
    for (const auto& [key, cell] : per_task) {
      const auto& [cfg, task_id] = key;
      d << on_off(cfg.trace_visible, "visible", "hidden") << "," << on_off(cfg.guidance_present, "present", "absent")
        << "," << to_string(cfg.formulation) << "," << task_id << "," << cell.first << "," << cell.second << ","
        << format_fixed(static_cast<double>(cell.second) / static_cast<double>(cell.first), 4) << "\n";
    }
    write_file(out_dir / "per_task_success.csv", d.str(), written);
  }

  if (md) {
    // Rows: trace x guidance. Columns: simplified / human-like.
    std::map<ConfigKey, const ConfigMetrics*> by_key;
    for (const auto& m : report.breakdown) by_key[m.key] = &m;
    auto find = [&](bool trace, bool guidance, Formulation f) -> const ConfigMetrics* {
      auto it = by_key.find({trace, guidance, f});
      return it == by_key.end() ? nullptr : it->second;
    };

    std::ostringstream t;
    t << "| Interaction trace | Behavioral guidance | Simplified | Human-like |\n";
    t << "|---|---|---|---|\n";
    for (bool trace : {false, true}) {
      for (bool guidance : {true, false}) {
        const auto* s = find(trace, guidance, Formulation::Simplified);
        const auto* h = find(trace, guidance, Formulation::HumanLike);
        if (!s && !h) continue;
        t << "| " << on_off(trace, "visible", "hidden") << " | " << on_off(guidance, "present", "absent") << " | "
          << rate_cell(s) << " | " << rate_cell(h) << " |\n";
      }
    }
    t << "\nSuccess rate with 95% normal-approximation half-width; " << report.n_excluded
      << " task(s) excluded, " << report.n_infra_failures << " infrastructure failure(s) not counted.\n";
    write_file(out_dir / "success_table.md", t.str(), written);

    std::ostringstream c;
    c << "| Trace | Guidance | Formulation | R_corr | 95% Clopper-Pearson | corrected / inaccurate first moves |\n";
    c << "|---|---|---|---|---|---|\n";
    for (const auto& m : report.breakdown) {
      c << "| " << on_off(m.key.trace_visible, "visible", "hidden") << " | "
        << on_off(m.key.guidance_present, "present", "absent") << " | " << to_string(m.key.formulation) << " | ";
      if (m.correction) {
        c << pct(m.correction->r_corr) << " | " << pct(m.correction->ci.lo) << "–" << pct(m.correction->ci.hi) << " | "
          << m.correction->numerator << " / " << m.correction->denominator << " |\n";
      } else {
        c << "undefined | -- | 0 / 0 |\n";
      }
    }
    c << "\nR_corr is conditional: its denominator counts only episodes whose first move landed outside the "
         "target.\n";
    write_file(out_dir / "correction_table.md", c.str(), written);
  }

  if (!move_or_click.empty()) {
    auto more = emit_move_or_click(move_or_click, out_dir, format);
    written.insert(written.end(), more.begin(), more.end());
  }
  return written;
}

}  // namespace clickbench
