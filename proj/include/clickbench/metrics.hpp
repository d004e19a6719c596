#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clickbench/runner.hpp"

namespace clickbench {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct RateEstimate {
  std::size_t successes = 0;
  std::size_t n = 0;
  double rate = 0.0;
  /// 1.96 * sqrt(rate (1 - rate) / n)
  double halfwidth = 0.0;
};

/// Normal-approximation 95% interval. Throws EmptyInput when n == 0.
RateEstimate success_rate_ci(std::size_t successes, std::size_t n);
/// Over records with infra failures removed.
RateEstimate success_rate_ci(std::span<const EpisodeRecord> records);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);
/// Inverse of incomplete_beta in x, by bisection.
double beta_quantile(double p, double a, double b);

/// Exact binomial interval from beta quantiles:
///   lo = B^-1(alpha/2; k, n-k+1), hi = B^-1(1-alpha/2; k+1, n-k)
/// with lo = 0 at k = 0 and hi = 1 at k = n. Throws InvalidArguments.
Interval clopper_pearson(std::size_t k, std::size_t n, double confidence = 0.95);

struct CorrectionRate {
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  double r_corr = 0.0;
  Interval ci;
};

/// Among episodes whose first executed action is a move landing outside
/// the target, the fraction that still ends in success (95% Clopper-Pearson).
/// Throws EmptyDenominator when no episode qualifies.
CorrectionRate correction_rate(std::span<const EpisodeRecord> records);

struct ConfigKey {
  bool trace_visible = false;
  bool guidance_present = false;
  Formulation formulation = Formulation::Simplified;

  auto operator<=>(const ConfigKey&) const = default;
};

struct ConfigMetrics {
  ConfigKey key;
  std::size_t n_episodes = 0;
  std::size_t n_infra_failures = 0;
  RateEstimate success;
  std::optional<CorrectionRate> correction;
};

struct MetricsReport {
  std::size_t n_tasks = 0;
  std::size_t n_episodes = 0;
  std::size_t n_excluded = 0;
  std::size_t n_infra_failures = 0;
  double success_rate = 0.0;
  double success_ci_halfwidth = 0.0;
  std::optional<CorrectionRate> correction;
  std::vector<ConfigMetrics> breakdown;
};

/// Aggregation is a pure count-based reduction, so record order is irrelevant.
MetricsReport summarize(std::span<const EpisodeRecord> records, std::size_t n_tasks, std::size_t n_excluded);

enum class ReportFormat { Csv, Markdown, Both };

struct MoveOrClickRow {
  std::string model;
  double accuracy = 0.0;
  std::size_t n = 0;
};

/// Writes summary.csv, breakdown.csv, success_table.md, correction_table.md,
/// per_task_success.csv (score distribution) and, when rows are given,
/// move_or_click.{csv,md}. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const MetricsReport& report, std::span<const EpisodeRecord> records,
                                               const std::filesystem::path& out_dir, ReportFormat format,
                                               std::span<const MoveOrClickRow> move_or_click = {});

/// move_or_click.{csv,md} only.
std::vector<std::filesystem::path> emit_move_or_click(std::span<const MoveOrClickRow> rows,
                                                      const std::filesystem::path& out_dir, ReportFormat format);

std::string format_fixed(double v, int decimals);

}  // namespace clickbench
