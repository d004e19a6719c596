#include "clickbench/metrics.hpp"

#include <cmath>
#include <limits>

#include "clickbench/error.hpp"

namespace clickbench {
namespace {

constexpr double kZ95 = 1.96;

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

RateEstimate success_rate_ci(std::size_t successes, std::size_t n) {
  if (n == 0) throw Error(Errc::EmptyInput, "success rate over zero episodes");
  if (successes > n) throw Error(Errc::InvalidArguments, "successes exceed episodes");
  RateEstimate r;
  r.successes = successes;
  r.n = n;
  r.rate = static_cast<double>(successes) / static_cast<double>(n);
  r.halfwidth = kZ95 * std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(n));
  return r;
}

RateEstimate success_rate_ci(std::span<const EpisodeRecord> records) {
  std::size_t n = 0;
  std::size_t k = 0;
  for (const auto& r : records) {
    if (r.infra_failure) continue;
    ++n;
    k += r.success ? 1 : 0;
  }
  return success_rate_ci(k, n);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw Error(Errc::InvalidArguments, "beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double beta_quantile(double p, double a, double b) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidArguments, "probability outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (incomplete_beta(a, b, mid) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Interval clopper_pearson(std::size_t k, std::size_t n, double confidence) {
  if (n == 0 || k > n || !(confidence > 0.0 && confidence < 1.0)) {
    throw Error(Errc::InvalidArguments, "clopper_pearson needs 0 <= k <= n, n >= 1, 0 < confidence < 1");
  }
  const double alpha = 1.0 - confidence;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  Interval ci;
  if (k == 0) {
    ci.lo = 0.0;
    ci.hi = 1.0 - std::pow(alpha / 2.0, 1.0 / nd);
  } else if (k == n) {
    ci.lo = std::pow(alpha / 2.0, 1.0 / nd);
    ci.hi = 1.0;
  } else {
    ci.lo = beta_quantile(alpha / 2.0, kd, nd - kd + 1.0);
    ci.hi = beta_quantile(1.0 - alpha / 2.0, kd + 1.0, nd - kd);
  }
  return ci;
}

CorrectionRate correction_rate(std::span<const EpisodeRecord> records) {
  CorrectionRate out;
  for (const auto& r : records) {
    if (r.infra_failure || !r.first_move_outside) continue;
    ++out.denominator;
    out.numerator += r.success ? 1 : 0;
  }
  if (out.denominator == 0) throw Error(Errc::EmptyDenominator, "no episode with an inaccurate first move");
  out.r_corr = static_cast<double>(out.numerator) / static_cast<double>(out.denominator);
  out.ci = clopper_pearson(out.numerator, out.denominator, 0.95);
  return out;
}

MetricsReport summarize(std::span<const EpisodeRecord> records, std::size_t n_tasks, std::size_t n_excluded) {
  MetricsReport report;
  report.n_tasks = n_tasks;
  report.n_excluded = n_excluded;
  report.n_episodes = records.size();

  std::map<ConfigKey, std::vector<EpisodeRecord>> groups;
  for (const auto& r : records) {
    report.n_infra_failures += r.infra_failure ? 1 : 0;
    groups[{r.config.trace_visible, r.config.guidance_present, r.config.formulation}].push_back(r);
  }

  const std::size_t valid = report.n_episodes - report.n_infra_failures;
  if (valid > 0) {
    const auto s = success_rate_ci(records);
    report.success_rate = s.rate;
    report.success_ci_halfwidth = s.halfwidth;
    try {
      report.correction = correction_rate(records);
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyDenominator) throw;
    }
  }

  for (const auto& [key, group] : groups) {
    ConfigMetrics m;
    m.key = key;
    m.n_episodes = group.size();
    for (const auto& r : group) m.n_infra_failures += r.infra_failure ? 1 : 0;
    if (m.n_infra_failures < m.n_episodes) {
      m.success = success_rate_ci(group);
      try {
        m.correction = correction_rate(group);
      } catch (const Error& e) {
        if (e.code() != Errc::EmptyDenominator) throw;
      }
    }
    report.breakdown.push_back(std::move(m));
  }
  return report;
}

}  // namespace clickbench
