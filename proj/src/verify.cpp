#include "jssa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "jssa/lyapunov.hpp"
#include "jssa/phy.hpp"
#include "jssa/scheduler.hpp"

namespace jssa::verify {

CheckResult oracle_equivalence(const SimConfig& cfg, int states, std::uint64_t seed) {
  using scheduler::UserId;
  CheckResult res{"oracle_equivalence", true, ""};
  constexpr std::size_t kUsers = 12;
  const int k_max = std::min(cfg.k_max, 4);
  phy::LinkBudget budget = cfg.link_budget();
  budget.antennas = std::max(budget.antennas, k_max + 1);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> queue(0.0, 1e7);
  std::uniform_real_distribution<double> spread_db(-40.0, 0.0);
  const double beta_ref = std::pow(10.0, phy::pathloss_db(50.0, cfg.pathloss_model()) / 10.0);
  const std::vector<UserId> pool = scheduler::all_users(kUsers);

  int mismatches = 0;
  for (int s = 0; s < states; ++s) {
    std::vector<double> q(kUsers), beta(kUsers);
    for (std::size_t n = 0; n < kUsers; ++n) {
      q[n] = queue(rng);
      beta[n] = beta_ref * std::pow(10.0, spread_db(rng) / 10.0);
    }
    const scheduler::RateFn rate = [&](UserId u, int k) {
      return phy::hardening_rate(beta[static_cast<std::size_t>(u)], k, budget);
    };
    const auto fast = scheduler::best_over_k(q, pool, k_max, rate);
    const auto slow = scheduler::exhaustive_oracle(q, pool, k_max, rate);
    if (fast.users != slow.users || fast.weight != slow.weight) ++mismatches;
  }
  res.passed = mismatches == 0;
  res.detail = std::to_string(states) + " states, " + std::to_string(mismatches) +
               " mismatches";
  return res;
}

CheckResult slot_inequality(int random_triples, std::uint64_t seed) {
  CheckResult res{"slot_inequality", true, ""};
  long violations = 0, checked = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      for (int k = 0; k <= 20; ++k) {
        ++checked;
        if (!lyapunov::check_slot_inequality(0.5 * i, 0.5 * j, 0.5 * k)) ++violations;
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < random_triples; ++t) {
    ++checked;
    const double q = u(rng), r = u(rng), a = u(rng);
    if (!lyapunov::check_slot_inequality(q, r, a)) ++violations;
  }
  res.passed = violations == 0;
  res.detail = std::to_string(checked) + " triples, " + std::to_string(violations) +
               " violations";
  return res;
}

CheckResult bound_identity(const SimConfig& cfg) {
  CheckResult res{"bound_identity", true, ""};
  const phy::LinkBudget budget = cfg.link_budget();
  const auto c = lyapunov::bound_constants(cfg.n_users, cfg.t_frame_slots,
                                           budget.r_max_bits, cfg.traffic.a_max_bits);
  const double expect = cfg.t_frame_slots * c.b1;
  res.passed = std::fabs(c.b2 - expect) <= 1e-12 * expect;
  char buf[160];
  std::snprintf(buf, sizeof buf, "B1=%.6g B2=%.6g T*B1=%.6g", c.b1, c.b2, expect);
  res.detail = buf;
  return res;
}

CheckResult short_run_audit(const SimConfig& cfg, std::int64_t horizon_slots) {
  CheckResult res{"short_run_audit", true, ""};
  SimConfig c = cfg;
  c.horizon_slots = horizon_slots / c.t_frame_slots * c.t_frame_slots;
  const RunResult r = run_simulation(c);
  const RunMetrics& m = r.metrics;
  const double conserved = m.total_arrived_bits - m.total_served_bits;
  const bool conservation = conserved == m.final_backlog_bits;
  res.passed = m.slot_inequality_violations == 0 &&
               (m.n_frames == 0 || m.audit_satisfied_fraction == 1.0) && conservation;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%lld frames, slot violations %lld, audit satisfied %.4f, conservation %s",
                static_cast<long long>(m.n_frames),
                static_cast<long long>(m.slot_inequality_violations),
                m.audit_satisfied_fraction, conservation ? "exact" : "broken");
  res.detail = buf;
  return res;
}

std::vector<CheckResult> run_all(const SimConfig& cfg) {
  cfg.validate();
  return {
      oracle_equivalence(cfg, 1000, cfg.rng_seed),
      slot_inequality(100000, cfg.rng_seed),
      bound_identity(cfg),
      short_run_audit(cfg, std::min<std::int64_t>(cfg.horizon_slots, 2000)),
  };
}

}  // namespace jssa::verify
