#include "jssa/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "jssa/errors.hpp"

namespace jssa::lyapunov {

BoundConstants bound_constants(std::size_t n_users, int t_frame, double r_max,
                               double a_max) {
  if (n_users == 0 || t_frame < 1 || !(r_max > 0.0) || !(a_max > 0.0)) {
    throw std::invalid_argument("bound_constants: arguments must be positive");
  }
  BoundConstants c;
  c.n_users = n_users;
  c.t_frame = t_frame;
  c.r_max = r_max;
  c.a_max = a_max;
  const double per_slot = r_max * r_max + a_max * a_max;
  const double n = static_cast<double>(n_users);
  const double t = static_cast<double>(t_frame);
  c.b1 = n * t * per_slot / 2.0;
  c.b2 = n * t * t * per_slot / 2.0;
  return c;
}

double lyapunov_value(std::span<const double> q) {
  double s = 0.0;
  for (double v : q) s += v * v;
  return 0.5 * s;
}

FrameAudit audit_frame(const FrameTrace& trace, double v, double cost,
                       const BoundConstants& consts, double unit_bits) {
  const std::size_t n = trace.q_start.size();
  if (trace.slots.size() != static_cast<std::size_t>(consts.t_frame)) {
    throw AuditError("audit_frame: frame holds " +
                     std::to_string(trace.slots.size()) + " slots, expected " +
                     std::to_string(consts.t_frame));
  }
  if (trace.q_end.size() != n) {
    throw AuditError("audit_frame: end-of-frame backlog missing");
  }
  for (const SlotRecord& s : trace.slots) {
    if (s.arrivals.size() != n || s.offered.size() != n) {
      throw AuditError("audit_frame: slot record has wrong user count");
    }
  }
  const double inv = 1.0 / unit_bits;

  double l0 = 0.0, l1 = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    const double a = trace.q_start[u] * inv;
    const double b = trace.q_end[u] * inv;
    l0 += a * a;
    l1 += b * b;
  }
  FrameAudit out;
  out.lyapunov_before = 0.5 * l0;
  out.lyapunov_after = 0.5 * l1;
  out.drift = out.lyapunov_after - out.lyapunov_before;
  out.penalty = trace.reconfigured ? v * cost : 0.0;
  out.lhs = out.drift + out.penalty;

  double frozen = 0.0;
  for (const SlotRecord& s : trace.slots) {
    for (std::size_t u = 0; u < n; ++u) {
      frozen += (trace.q_start[u] * inv) * ((s.arrivals[u] - s.offered[u]) * inv);
    }
  }
  out.rhs = consts.b2 * inv * inv + frozen + out.penalty;
  out.satisfied = out.lhs <= out.rhs;
  return out;
}

bool check_slot_inequality(double q, double r, double a) {
  const double next = std::max(q - r, 0.0) + a;
  const double lhs = next * next - q * q;
  const double rhs = r * r + a * a - 2.0 * q * (r - a);
  const double scale = (q + r + a) * (q + r + a);
  return lhs <= rhs + 8.0 * std::numeric_limits<double>::epsilon() * scale;
}

SlopeTest slope_test(std::span<const double> y, int lags) {
  SlopeTest out;
  out.n = y.size();
  if (y.size() < 3) {
    throw std::invalid_argument("slope_test: need at least 3 samples");
  }
  const double n = static_cast<double>(y.size());
  const double x_mean = (n - 1.0) / 2.0;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dx = static_cast<double>(i) - x_mean;
    sxx += dx * dx;
    sxy += dx * (y[i] - y_mean);
  }
  out.slope = sxy / sxx;
  const double intercept = y_mean - out.slope * x_mean;

  if (lags < 0) lags = static_cast<int>(std::floor(4.0 * std::pow(n / 100.0, 2.0 / 9.0)));
  lags = std::min<int>(lags, static_cast<int>(y.size()) - 1);
  out.hac_lags = lags;

  // score_i = (x_i - xbar) e_i
  std::vector<double> score(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = static_cast<double>(i);
    score[i] = (x - x_mean) * (y[i] - intercept - out.slope * x);
  }
  double meat = 0.0;
  for (double s : score) meat += s * s;
  for (int l = 1; l <= lags; ++l) {
    const double w = 1.0 - l / (lags + 1.0);
    double acc = 0.0;
    for (std::size_t i = static_cast<std::size_t>(l); i < score.size(); ++i) {
      acc += score[i] * score[i - l];
    }
    meat += 2.0 * w * acc;
  }
  meat *= n / (n - 2.0);
  out.std_error = std::sqrt(std::max(meat, 0.0)) / sxx;
  if (out.std_error > 0.0) {
    out.t_stat = out.slope / out.std_error;
    boost::math::students_t dist(n - 2.0);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(
                            dist, std::fabs(out.t_stat)));
  } else {
    out.t_stat = out.slope == 0.0 ? 0.0 : std::copysign(INFINITY, out.slope);
    out.p_value = out.slope == 0.0 ? 1.0 : 0.0;
  }
  return out;
}

namespace {

struct TrendFit {
  double slope = 0.0;
  double std_error = 0.0;
};

// OLS slope on 0..n-1 and its Bartlett b = 1 standard error, which reduces to
// 2/n times the sum of squared partial sums of the slope scores.
TrendFit fixed_b_fit(std::span<const double> y) {
  const double n = static_cast<double>(y.size());
  const double x_mean = (n - 1.0) / 2.0;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dx = static_cast<double>(i) - x_mean;
    sxx += dx * dx;
    sxy += dx * (y[i] - y_mean);
  }
  TrendFit fit;
  fit.slope = sxy / sxx;
  const double intercept = y_mean - fit.slope * x_mean;
  double partial = 0.0, meat = 0.0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double x = static_cast<double>(i);
    partial += (x - x_mean) * (y[i] - intercept - fit.slope * x);
    meat += partial * partial;
  }
  meat *= 2.0 / n;
  fit.std_error = std::sqrt(std::max(meat, 0.0)) / sxx;
  return fit;
}

}  // namespace

SlopeTest slope_test_fixed_b(std::span<const double> y, int null_draws) {
  if (y.size() < 3) {
    throw std::invalid_argument("slope_test_fixed_b: need at least 3 samples");
  }
  if (null_draws < 1) {
    throw std::invalid_argument("slope_test_fixed_b: null_draws must be >= 1");
  }
  SlopeTest out;
  out.n = y.size();
  out.fixed_b = true;
  out.hac_lags = static_cast<int>(y.size()) - 1;
  const TrendFit fit = fixed_b_fit(y);
  out.slope = fit.slope;
  out.std_error = fit.std_error;
  if (fit.std_error == 0.0) {
    out.t_stat = fit.slope == 0.0 ? 0.0 : std::copysign(INFINITY, fit.slope);
    out.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
    return out;
  }
  out.t_stat = fit.slope / fit.std_error;

  std::mt19937_64 rng(0x5eed'f1ed'b000ULL + y.size());
  std::normal_distribution<double> normal;
  std::vector<double> noise(y.size());
  int exceed = 0;
  for (int d = 0; d < null_draws; ++d) {
    for (double& e : noise) e = normal(rng);
    const TrendFit null_fit = fixed_b_fit(noise);
    if (std::fabs(null_fit.slope / null_fit.std_error) >= std::fabs(out.t_stat)) ++exceed;
  }
  out.p_value = (exceed + 1.0) / (null_draws + 1.0);
  return out;
}

namespace {

std::pair<double, double> mean_se(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

TrendReport tradeoff_report(std::vector<TrendPoint> points, double b2) {
  std::set<double> distinct;
  for (const auto& p : points) distinct.insert(p.v);
  if (distinct.size() < 3 || distinct.size() != points.size()) {
    throw std::invalid_argument(
        "tradeoff_report: need at least 3 runs at distinct V");
  }
  std::sort(points.begin(), points.end(),
            [](const TrendPoint& a, const TrendPoint& b) { return a.v < b.v; });

  TrendReport rep;
  for (const auto& p : points) {
    TrendRow row;
    row.v = p.v;
    std::tie(row.cost_mean, row.cost_se) = mean_se(p.avg_cost);
    std::tie(row.reconfig_mean, row.reconfig_se) = mean_se(p.reconfig_rate);
    std::tie(row.queue_mean, row.queue_se) = mean_se(p.avg_total_queue);
    row.b2_over_v = b2 / p.v;
    rep.rows.push_back(row);
  }

  char buf[256];
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const TrendRow& a = rep.rows[i - 1];
    const TrendRow& b = rep.rows[i];
    const double cost_tol = 2.0 * std::hypot(a.cost_se, b.cost_se);
    const double rc_tol = 2.0 * std::hypot(a.reconfig_se, b.reconfig_se);
    const double q_tol = 2.0 * std::hypot(a.queue_se, b.queue_se);
    if (b.cost_mean - a.cost_mean > cost_tol) {
      rep.cost_non_increasing = false;
      std::snprintf(buf, sizeof buf, "avg cost rises from V=%g to V=%g (%.6g -> %.6g)",
                    a.v, b.v, a.cost_mean, b.cost_mean);
      rep.violations.emplace_back(buf);
    }
    if (b.reconfig_mean - a.reconfig_mean > rc_tol) {
      rep.reconfig_non_increasing = false;
      std::snprintf(buf, sizeof buf, "reconfig rate rises from V=%g to V=%g (%.6g -> %.6g)",
                    a.v, b.v, a.reconfig_mean, b.reconfig_mean);
      rep.violations.emplace_back(buf);
    }
    if (a.queue_mean - b.queue_mean > q_tol) {
      rep.queue_non_decreasing = false;
      std::snprintf(buf, sizeof buf, "avg queue falls from V=%g to V=%g (%.6g -> %.6g)",
                    a.v, b.v, a.queue_mean, b.queue_mean);
      rep.violations.emplace_back(buf);
    }
    if (!(b.reconfig_mean < a.reconfig_mean)) rep.reconfig_strictly_decreasing = false;
    if (!(b.queue_mean > a.queue_mean)) rep.queue_strictly_increasing = false;
  }
  return rep;
}

std::string TrendReport::to_text() const {
  std::ostringstream os;
  char buf[256];
  os << "# V  avg_cost  se  reconfig_rate  se  avg_total_queue_bits  se  B2/V\n";
  for (const TrendRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%g %.6g %.3g %.6g %.3g %.6g %.3g %.6g\n", r.v,
                  r.cost_mean, r.cost_se, r.reconfig_mean, r.reconfig_se,
                  r.queue_mean, r.queue_se, r.b2_over_v);
    os << buf;
  }
  os << "cost_non_increasing " << (cost_non_increasing ? "yes" : "no") << '\n'
     << "reconfig_non_increasing " << (reconfig_non_increasing ? "yes" : "no") << '\n'
     << "queue_non_decreasing " << (queue_non_decreasing ? "yes" : "no") << '\n'
     << "reconfig_strictly_decreasing " << (reconfig_strictly_decreasing ? "yes" : "no") << '\n'
     << "queue_strictly_increasing " << (queue_strictly_increasing ? "yes" : "no") << '\n';
  for (const auto& v : violations) os << "violation: " << v << '\n';
  return os.str();
}

}  // namespace jssa::lyapunov
