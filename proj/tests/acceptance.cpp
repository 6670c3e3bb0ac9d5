// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
// Usage: jssa_acceptance [path-to-jssa-cli]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jssa/engine.hpp"
#include "jssa/io.hpp"
#include "jssa/lyapunov.hpp"
#include "jssa/phy.hpp"
#include "jssa/verify.hpp"

namespace fs = std::filesystem;
using namespace jssa;

namespace {

// Frozen from a Monte-Carlo calibration over drop seeds 1..5: the median
// per-draw gap at M = 64, k = 10 ranged 0.0175..0.0188.
constexpr double kHardeningGapThreshold = 0.03;

int g_failures = 0;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

void verdict(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d %s: %s\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion_oracle() {
  Stopwatch sw;
  SimConfig cfg;
  cfg.k_max = 4;
  const auto r = verify::oracle_equivalence(cfg, 1000, 2024);
  const double t = sw.seconds();
  verdict(1, "oracle equivalence", r.passed && t < 10.0,
          r.detail + fmt(", %.2fs (limit 10s)", t));
}

void criterion_slot_inequality() {
  Stopwatch sw;
  const auto r = verify::slot_inequality(100000, 2025);
  const double t = sw.seconds();
  verdict(2, "slot inequality", r.passed && t < 5.0, r.detail + fmt(", %.2fs (limit 5s)", t));
}

void criterion_drift_audit() {
  Stopwatch sw;
  SimConfig cfg;
  cfg.n_users = 50;
  cfg.p_pilots = 20;
  cfg.t_frame_slots = 20;
  cfg.v_param = 2000.0;
  cfg.horizon_slots = 20 * 10000;
  cfg.rng_seed = 7;
  const RunResult run = run_simulation(cfg);
  const auto& m = run.metrics;
  const double t = sw.seconds();
  const bool pass = m.n_frames >= 10000 && m.audit_lhs_mean <= m.audit_rhs_mean &&
                    m.audit_satisfied_fraction >= 0.99 && t < 120.0;
  verdict(3, "drift-plus-penalty audit", pass,
          fmt("%lld frames, mean lhs %.6g <= mean rhs %.6g, %.4f of frames satisfied, "
              "%.1fs (limit 120s)",
              static_cast<long long>(m.n_frames), m.audit_lhs_mean, m.audit_rhs_mean,
              m.audit_satisfied_fraction, t));
}

struct ModeRuns {
  scheduler::PoolUpdate mode;
  std::vector<RunResult> runs;  // ascending V
};

void criterion_tradeoff_and_stability() {
  Stopwatch sw;
  const std::vector<double> v_grid{200.0, 2000.0, 20000.0};
  std::vector<ModeRuns> modes;
  for (auto mode : {scheduler::PoolUpdate::ReplaceLru, scheduler::PoolUpdate::ReplaceAll}) {
    SimConfig cfg;  // N=300, M=64, K=10, P=60, T=20, C=1, 100 s
    cfg.pool_update = mode;
    modes.push_back({mode, run_sweep(cfg, v_grid, 1)});
  }
  const double t = sw.seconds();

  bool any_window = false;
  bool any_monotone = false;
  std::string detail;
  for (const auto& mr : modes) {
    const auto& r = mr.runs;
    const bool window = r[0].metrics.reconfig_rate > 0.8 && r[2].metrics.reconfig_rate < 0.5 &&
                        r[2].metrics.avg_total_queue_bits > r[0].metrics.avg_total_queue_bits;
    const bool monotone =
        r[0].metrics.reconfig_rate > r[1].metrics.reconfig_rate &&
        r[1].metrics.reconfig_rate > r[2].metrics.reconfig_rate &&
        r[0].metrics.avg_total_queue_bits < r[1].metrics.avg_total_queue_bits &&
        r[1].metrics.avg_total_queue_bits < r[2].metrics.avg_total_queue_bits;
    any_window = any_window || window;
    any_monotone = any_monotone || monotone;
    detail += fmt("%s: rate %.3f/%.3f/%.3f queue %.4g/%.4g/%.4g (windows %s, strict trend %s); ",
                  std::string(scheduler::to_string(mr.mode)).c_str(),
                  r[0].metrics.reconfig_rate, r[1].metrics.reconfig_rate,
                  r[2].metrics.reconfig_rate, r[0].metrics.avg_total_queue_bits,
                  r[1].metrics.avg_total_queue_bits, r[2].metrics.avg_total_queue_bits,
                  window ? "met" : "missed", monotone ? "yes" : "no");
  }
  detail += fmt("%.1fs (limit 600s)", t);
  verdict(4, "cost/backlog tradeoff over V", (any_window || any_monotone) && t < 600.0, detail);

  // Stability on the default-mode run at V = 200.
  const auto& windows = modes[0].runs[0].metrics.windows;
  std::vector<double> tail;
  for (std::size_t i = windows.size() - windows.size() / 5; i < windows.size(); ++i) {
    tail.push_back(windows[i].total_queue_bits);
  }
  const auto st = lyapunov::slope_test_fixed_b(tail);
  const auto nw = lyapunov::slope_test(tail);
  verdict(5, "queue stability at V=200", st.zero_slope_accepted(0.05),
          fmt("final %zu windows, slope %.4g bits/window, fixed-b t = %.2f, p = %.3f "
              "(short-bandwidth Newey-West, %d lags: p = %.3f)",
              st.n, st.slope, st.t_stat, st.p_value, nw.hac_lags, nw.p_value));
}

void criterion_hardening() {
  Stopwatch sw;
  SimConfig cfg;
  cfg.rng_seed = 101;
  const auto users = drop_users(cfg);
  phy::LinkBudget budget = cfg.link_budget();
  budget.r_max_bits = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(424242);

  constexpr int kGroup = 10;
  constexpr int kGroups = 20;
  constexpr int kDraws = 200;
  std::vector<double> mean_cv;
  double gap64 = 0.0;
  for (int antennas : {16, 64, 256}) {
    budget.antennas = antennas;
    std::vector<double> gaps;
    double cv_sum = 0.0;
    for (int g = 0; g < kGroups; ++g) {
      std::vector<double> betas;
      for (int i = 0; i < kGroup; ++i) betas.push_back(users[g * kGroup + i].gain.beta);
      std::vector<std::vector<double>> rates(kGroup);
      for (int d = 0; d < kDraws; ++d) {
        const auto h = phy::draw_small_scale(antennas, betas, rng);
        const auto w = phy::mmse_precoders(h, budget.p_tot_w, budget.noise_w);
        const auto r = phy::realized_rates(h, w, budget);
        for (int i = 0; i < kGroup; ++i) rates[i].push_back(r[i]);
      }
      for (int i = 0; i < kGroup; ++i) {
        double mean = 0.0;
        for (double x : rates[i]) mean += x;
        mean /= kDraws;
        double var = 0.0;
        for (double x : rates[i]) var += (x - mean) * (x - mean);
        var /= kDraws - 1;
        const double hard = phy::hardening_rate(betas[i], kGroup, budget);
        for (double x : rates[i]) gaps.push_back(std::abs(x - hard) / hard);
        cv_sum += std::sqrt(var) / mean;
      }
    }
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    if (antennas == 64) gap64 = gaps[gaps.size() / 2];
    mean_cv.push_back(cv_sum / (kGroups * kGroup));
  }
  const double t = sw.seconds();
  const bool cv_decreasing = mean_cv[0] > mean_cv[1] && mean_cv[1] > mean_cv[2];
  verdict(6, "channel hardening", gap64 < kHardeningGapThreshold && cv_decreasing && t < 60.0,
          fmt("median gap at M=64 %.4f (threshold %.3f), CV %.4f/%.4f/%.4f for M=16/64/256, "
              "%.1fs (limit 60s)",
              gap64, kHardeningGapThreshold, mean_cv[0], mean_cv[1], mean_cv[2], t));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / fs::path("jssa_acceptance_determinism");
  fs::remove_all(dir);
  fs::create_directories(dir);
  SimConfig cfg;
  cfg.horizon_slots = 20000;
  cfg.rng_seed = 11;
  {
    std::ofstream(dir / "run.cfg") << io::write_config(cfg);
  }
  bool ok = true;
  std::string detail;
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = "\"" + cli + "\" run --config \"" + (dir / "run.cfg").string() +
                            "\" --out \"" + (dir / sub).string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      ok = false;
      detail = "run invocation failed: " + cmd;
    }
  }
  if (ok) {
    for (const char* f : {"series.csv", "audit.csv"}) {
      const std::string a = slurp(dir / "a" / f);
      const std::string b = slurp(dir / "b" / f);
      const bool same = !a.empty() && a == b;
      ok = ok && same;
      detail += fmt("%s %s (%zu bytes); ", f, same ? "identical" : "DIFFERENT", a.size());
    }
  }
  fs::remove_all(dir);
  verdict(7, "determinism", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "jssa";
  try {
    criterion_oracle();
    criterion_slot_inequality();
    criterion_drift_audit();
    criterion_tradeoff_and_stability();
    criterion_hardening();
    criterion_determinism(cli);
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criterion failure(s)\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
