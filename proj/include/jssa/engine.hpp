#pragma once

// Two-timescale simulation: policy decisions every T slots, queue updates
// every slot.

#include <cstdint>
#include <vector>

#include "jssa/lyapunov.hpp"
#include "jssa/phy.hpp"
#include "jssa/scheduler.hpp"

namespace jssa {

struct SimConfig {
  std::size_t n_users = 300;
  int m_antennas = 64;
  int k_max = 10;
  std::size_t p_pilots = 60;
  double bandwidth_hz = 20e6;
  double gamma = 0.8;
  double p_tot_w = 1.0;
  double slot_s = 1e-3;
  int t_frame_slots = 20;
  double v_param = 200.0;
  double cost_c = 1.0;
  scheduler::PolicyKind policy = scheduler::PolicyKind::Jssa;
  scheduler::PoolUpdate pool_update = scheduler::PoolUpdate::ReplaceLru;
  std::int64_t horizon_slots = 100000;
  std::uint64_t rng_seed = 1;
  double cell_side_m = 250.0;
  int report_window_slots = 100;
  // Queues and rates enter the scheduling weight and the Lyapunov audit in
  // units of this many bits, which sets the scale of C against Q*R.
  double weight_unit_bits = 40000.0;
  bool phy_validation = false;
  double warmup_fraction = 0.1;

  struct Traffic {
    double min_interarrival_s = 0.5;
    double max_interarrival_s = 2.0;
    double file_size_bits = 1.6e6;
    double a_max_bits = 8e6;
    // Multiplies every user's file arrival rate; 0 disables traffic.
    double load_scale = 1.0;
  } traffic;

  struct Channel {
    double loss_at_1km_db = -148.1;
    double pathloss_exponent = 3.76;
    double shadow_sigma_db = 10.0;
    double min_distance_m = 10.0;
    double noise_figure_db = 7.0;
  } channel;

  // Throws ConfigError naming the first offending key.
  void validate() const;

  phy::PathLossModel pathloss_model() const;
  phy::LinkBudget link_budget() const;  // R_max already filled in
  scheduler::SchedulerParams scheduler_params() const;
  std::int64_t n_frames() const { return horizon_slots / t_frame_slots; }
  // Warm-up length in slots: floor(fraction * horizon) rounded down to a
  // multiple of both the frame and the report window.
  std::int64_t warmup_slots() const;
};

struct UserState {
  phy::Point position;
  phy::LargeScaleGain gain;
  double mean_interarrival_s = 0.0;
};

struct FrameRow {
  std::int64_t frame = 0;
  bool reconfigured = false;
  int k_star = 0;
  double w1 = 0.0;
  double w2 = 0.0;
  double cost_charged = 0.0;
  bool degenerate = false;
  lyapunov::FrameAudit audit;
};

struct WindowRow {
  double window_end_s = 0.0;
  double throughput_bps = 0.0;
  double total_queue_bits = 0.0;  // slot-averaged over the window
  std::int64_t reconfig_flag_count = 0;
  double avg_cost_to_date = 0.0;
  double cumulative_throughput_bps = 0.0;
};

struct RunMetrics {
  std::int64_t n_frames = 0;
  std::int64_t warmup_frames = 0;
  std::int64_t warmup_windows = 0;
  std::int64_t reconfig_count = 0;  // after warm-up
  double reconfig_rate = 0.0;
  double charge_per_reconfig = 0.0;  // C, or 0 for the cost-free benchmark
  double avg_cost = 0.0;             // per second
  double avg_total_queue_bits = 0.0;
  double avg_throughput_bps = 0.0;
  double total_served_bits = 0.0;
  double total_arrived_bits = 0.0;
  double final_backlog_bits = 0.0;
  double wasted_service_bits = 0.0;
  std::uint64_t truncations = 0;
  std::int64_t degenerate_frames = 0;
  std::int64_t slot_inequality_violations = 0;
  double audit_lhs_mean = 0.0;
  double audit_rhs_mean = 0.0;
  double audit_satisfied_fraction = 0.0;
  lyapunov::BoundConstants bounds;  // in bits
  std::vector<WindowRow> windows;
  std::vector<FrameRow> frames;
};

struct RunTrace {
  std::vector<UserState> users;
  std::vector<scheduler::UserId> initial_pool;
  // Per-frame slot records; filled only when requested.
  std::vector<lyapunov::FrameTrace> frame_traces;
};

struct RunResult {
  SimConfig config;
  RunMetrics metrics;
  RunTrace trace;
};

struct RunOptions {
  bool keep_slot_records = false;
  bool check_slot_inequality = true;
};

// Deterministic in (cfg, cfg.rng_seed). Throws ConfigError before simulating
// when cfg is invalid.
RunResult run_simulation(const SimConfig& cfg, RunOptions opts = {});

// One run per (V, seed index), seeds base.rng_seed + i. Arrivals, placement
// and shadowing depend only on the seed, so runs at different V share them.
// Results are ordered V-major, then seed.
std::vector<RunResult> run_sweep(const SimConfig& base,
                                 const std::vector<double>& v_grid,
                                 int n_seeds, unsigned threads = 0);

// Placement, gains and traffic parameters of a run, without simulating.
std::vector<UserState> drop_users(const SimConfig& cfg);
std::vector<scheduler::UserId> initial_pool(const std::vector<UserState>& users,
                                            std::size_t pilots);

}  // namespace jssa
