#pragma once

// Quadratic Lyapunov quantities and sample-path checks of the drift bounds.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace jssa::lyapunov {

struct BoundConstants {
  double b1 = 0.0;  // N T (R_max^2 + A_max^2) / 2
  double b2 = 0.0;  // N T^2 (R_max^2 + A_max^2) / 2
  double r_max = 0.0;
  double a_max = 0.0;
  std::size_t n_users = 0;
  int t_frame = 0;
};

BoundConstants bound_constants(std::size_t n_users, int t_frame, double r_max,
                               double a_max);

// L(Q) = 1/2 sum Q_n^2
double lyapunov_value(std::span<const double> q);

// One slot, all users. `offered` is I_n R_n, `served` is min(Q_n, I_n R_n).
struct SlotRecord {
  std::vector<double> arrivals;
  std::vector<double> offered;
  std::vector<double> served;
};

// One frame [t, t+T-1] of a sample path.
struct FrameTrace {
  std::vector<double> q_start;  // Q(t)
  std::vector<double> q_end;    // Q(t+T)
  std::vector<SlotRecord> slots;
  bool reconfigured = false;
};

struct FrameAudit {
  double lyapunov_before = 0.0;
  double lyapunov_after = 0.0;
  double drift = 0.0;
  double penalty = 0.0;  // V C I^s(t)
  double lhs = 0.0;      // drift + penalty
  double rhs = 0.0;      // B2 + sum_tau sum_n Q_n(t)(A_n - I_n R_n) + penalty
  bool satisfied = false;
};

// Evaluates the frozen-queue drift-plus-penalty bound on one realized frame.
// Bit quantities (trace and consts) are divided by `unit_bits` first so the
// penalty V C is in the same units as the queue weights. Throws AuditError
// when the trace does not hold exactly consts.t_frame slots.
FrameAudit audit_frame(const FrameTrace& trace, double v, double cost,
                       const BoundConstants& consts, double unit_bits = 1.0);

// Q'^2 - Q^2 <= R^2 + A^2 - 2 Q (R - A) with Q' = max(Q - R, 0) + A.
// Compared with a relative slack of a few ulps of (Q + R + A)^2, since both
// sides are equal whenever R = 0 or A = 0.
bool check_slot_inequality(double q, double r, double a);

// Least-squares slope of a series against its sample index with a
// Newey-West (Bartlett) standard error; two-sided Student-t test of slope = 0.
struct SlopeTest {
  double slope = 0.0;  // per sample
  double std_error = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  int hac_lags = 0;
  std::size_t n = 0;
  bool fixed_b = false;  // p-value from the fixed-b null rather than Student t
  bool zero_slope_accepted(double alpha = 0.05) const { return p_value > alpha; }
};

// lags < 0 selects floor(4 (n/100)^(2/9)).
SlopeTest slope_test(std::span<const double> series, int lags = -1);

// Bartlett kernel with bandwidth equal to the sample size. Its null
// distribution does not depend on the serial correlation of the noise, so it
// keeps its level on series whose correlation time is a sizeable fraction of
// the sample. The p-value comes from `null_draws` simulated Gaussian series of
// the same length (fixed internal seed, so the result is deterministic).
SlopeTest slope_test_fixed_b(std::span<const double> series, int null_draws = 20000);

// Results of runs at one V, one entry per seed.
struct TrendPoint {
  double v = 0.0;
  std::vector<double> avg_cost;
  std::vector<double> reconfig_rate;
  std::vector<double> avg_total_queue;
};

struct TrendRow {
  double v = 0.0;
  double cost_mean = 0.0, cost_se = 0.0;
  double reconfig_mean = 0.0, reconfig_se = 0.0;
  double queue_mean = 0.0, queue_se = 0.0;
  double b2_over_v = 0.0;
};

struct TrendReport {
  std::vector<TrendRow> rows;  // ascending V
  bool cost_non_increasing = true;
  bool reconfig_non_increasing = true;
  bool queue_non_decreasing = true;
  bool reconfig_strictly_decreasing = true;
  bool queue_strictly_increasing = true;
  std::vector<std::string> violations;

  std::string to_text() const;
};

// Cost and queue trends over V. A step counts as a violation only when it
// moves the wrong way by more than two combined standard errors (zero with a
// single seed). Throws std::invalid_argument for fewer than 3 distinct V.
TrendReport tradeoff_report(std::vector<TrendPoint> points, double b2);

}  // namespace jssa::lyapunov
