#include "jssa/engine.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <future>
#include <numeric>
#include <thread>

#include "jssa/errors.hpp"
#include "jssa/queueing.hpp"
#include "jssa/traffic.hpp"

namespace jssa {

namespace {

enum Stream : std::uint32_t {
  kPlacement = 1,
  kShadowing = 2,
  kTrafficParams = 3,
  kArrivals = 4,
  kSmallScale = 5,
  kPolicy = 6,
};

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

template <typename T>
void require(bool ok, const char* key, const T& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

void SimConfig::validate() const {
  require(n_users >= 1, "n_users", "must be >= 1");
  require(m_antennas >= 2, "m_antennas", "must be >= 2");
  require(k_max >= 1, "k_max", "must be >= 1");
  require(k_max < m_antennas, "k_max", "requires K < M");
  require(static_cast<std::size_t>(k_max) < p_pilots, "p_pilots",
          "requires K < P (k_max=" + std::to_string(k_max) +
              ", p_pilots=" + std::to_string(p_pilots) + ")");
  require(p_pilots < n_users, "p_pilots", "requires P < N");
  require(bandwidth_hz > 0.0, "bandwidth_hz", "must be positive");
  require(gamma > 0.0 && gamma <= 1.0, "gamma", "must lie in (0, 1]");
  require(p_tot_w > 0.0, "p_tot_w", "must be positive");
  require(slot_s > 0.0, "slot_s", "must be positive");
  require(t_frame_slots >= 1, "t_frame_slots", "must be >= 1");
  require(v_param > 1.0, "v_param", "requires V > 1");
  require(cost_c >= 0.0, "cost_c", "must be >= 0");
  require(horizon_slots >= 0, "horizon_slots", "must be >= 0");
  require(horizon_slots % t_frame_slots == 0, "horizon_slots",
          "must be a multiple of t_frame_slots");
  require(cell_side_m > 0.0, "cell_side_m", "must be positive");
  require(report_window_slots >= 1, "report_window_slots", "must be >= 1");
  require(weight_unit_bits > 0.0, "weight_unit_bits", "must be positive");
  require(warmup_fraction >= 0.0 && warmup_fraction < 1.0, "warmup_fraction",
          "must lie in [0, 1)");
  require(traffic.min_interarrival_s > 0.0, "traffic.min_interarrival_s",
          "must be positive");
  require(traffic.max_interarrival_s >= traffic.min_interarrival_s,
          "traffic.max_interarrival_s", "must be >= min_interarrival_s");
  require(traffic.file_size_bits > 0.0, "traffic.file_size_bits",
          "must be positive");
  require(traffic.a_max_bits >= traffic.file_size_bits, "traffic.a_max_bits",
          "must be >= file_size_bits");
  require(traffic.load_scale >= 0.0, "traffic.load_scale", "must be >= 0");
  require(std::isfinite(channel.loss_at_1km_db), "channel.loss_at_1km_db",
          "must be finite");
  require(channel.pathloss_exponent > 0.0, "channel.pathloss_exponent",
          "must be positive");
  require(channel.shadow_sigma_db >= 0.0, "channel.shadow_sigma_db",
          "must be >= 0");
  require(channel.min_distance_m > 0.0, "channel.min_distance_m",
          "must be positive");
  require(std::isfinite(channel.noise_figure_db), "channel.noise_figure_db",
          "must be finite");
}

phy::PathLossModel SimConfig::pathloss_model() const {
  phy::PathLossModel m;
  m.loss_at_1km_db = channel.loss_at_1km_db;
  m.exponent = channel.pathloss_exponent;
  m.min_distance_m = channel.min_distance_m;
  m.shadow_sigma_db = channel.shadow_sigma_db;
  return m;
}

phy::LinkBudget SimConfig::link_budget() const {
  phy::LinkBudget b;
  b.p_tot_w = p_tot_w;
  b.noise_w = phy::noise_power_w(bandwidth_hz, channel.noise_figure_db);
  b.antennas = m_antennas;
  b.bandwidth_hz = bandwidth_hz;
  b.gamma = gamma;
  b.slot_s = slot_s;
  b.r_max_bits = phy::max_rate_bits(pathloss_model(), b);
  return b;
}

scheduler::SchedulerParams SimConfig::scheduler_params() const {
  scheduler::SchedulerParams p;
  p.v = v_param;
  p.cost = cost_c;
  p.t_frame = t_frame_slots;
  p.k_max = k_max;
  p.pilots = p_pilots;
  p.pool_update = pool_update;
  return p;
}

std::int64_t SimConfig::warmup_slots() const {
  const std::int64_t step = std::lcm<std::int64_t>(t_frame_slots, report_window_slots);
  const auto raw = static_cast<std::int64_t>(
      std::floor(warmup_fraction * static_cast<double>(horizon_slots)));
  return raw / step * step;
}

std::vector<UserState> drop_users(const SimConfig& cfg) {
  auto place = make_rng(cfg.rng_seed, kPlacement);
  auto shadow = make_rng(cfg.rng_seed, kShadowing);
  auto params = make_rng(cfg.rng_seed, kTrafficParams);
  std::uniform_real_distribution<double> coord(0.0, cfg.cell_side_m);
  std::normal_distribution<double> shadow_db(0.0, cfg.channel.shadow_sigma_db);
  const phy::Point bs{cfg.cell_side_m / 2.0, cfg.cell_side_m / 2.0};
  const phy::PathLossModel model = cfg.pathloss_model();
  const std::vector<double> interarrival = traffic::draw_interarrivals(
      cfg.n_users, cfg.traffic.min_interarrival_s,
      cfg.traffic.max_interarrival_s, params);

  std::vector<UserState> users(cfg.n_users);
  for (std::size_t n = 0; n < cfg.n_users; ++n) {
    UserState& u = users[n];
    u.position.x_m = coord(place);
    u.position.y_m = coord(place);
    const double s = cfg.channel.shadow_sigma_db > 0.0 ? shadow_db(shadow) : 0.0;
    u.gain = phy::path_gain(u.position, bs, s, model);
    u.mean_interarrival_s = cfg.traffic.load_scale > 0.0
                                ? interarrival[n] / cfg.traffic.load_scale
                                : INFINITY;
  }
  return users;
}

std::vector<scheduler::UserId> initial_pool(const std::vector<UserState>& users,
                                            std::size_t pilots) {
  std::vector<scheduler::UserId> ids = scheduler::all_users(users.size());
  std::stable_sort(ids.begin(), ids.end(), [&](auto a, auto b) {
    return users[a].gain.beta > users[b].gain.beta;
  });
  ids.resize(std::min(pilots, ids.size()));
  std::sort(ids.begin(), ids.end());
  return ids;
}

RunResult run_simulation(const SimConfig& cfg, RunOptions opts) {
  cfg.validate();
  using scheduler::UserId;

  RunResult result;
  result.config = cfg;
  RunMetrics& m = result.metrics;
  RunTrace& trace = result.trace;

  const std::size_t n = cfg.n_users;
  const int t_frame = cfg.t_frame_slots;
  const phy::LinkBudget budget = cfg.link_budget();

  trace.users = drop_users(cfg);
  trace.initial_pool = initial_pool(trace.users, cfg.p_pilots);

  // Hardening rates, whole bits per slot, indexed [k][user].
  std::vector<std::vector<double>> rate_table(cfg.k_max + 1,
                                              std::vector<double>(n, 0.0));
  std::vector<double> betas(n);
  for (std::size_t u = 0; u < n; ++u) betas[u] = trace.users[u].gain.beta;
  for (int k = 1; k <= cfg.k_max; ++k) {
    for (std::size_t u = 0; u < n; ++u) {
      rate_table[k][u] = std::floor(phy::hardening_rate(betas[u], k, budget));
    }
  }
  const double unit = cfg.weight_unit_bits;
  const scheduler::RateFn weight_rate = [&](UserId u, int k) {
    return rate_table[k][static_cast<std::size_t>(u)] / unit;
  };

  traffic::TrafficConfig tcfg;
  tcfg.file_size_bits = cfg.traffic.file_size_bits;
  tcfg.slot_s = cfg.slot_s;
  tcfg.a_max_bits = cfg.traffic.a_max_bits;
  tcfg.mean_interarrival_s.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    tcfg.mean_interarrival_s[u] = trace.users[u].mean_interarrival_s;
  }
  traffic::ArrivalGenerator arrivals_gen(tcfg);

  auto arrival_rng = make_rng(cfg.rng_seed, kArrivals);
  auto channel_rng = make_rng(cfg.rng_seed, kSmallScale);
  auto policy_rng = make_rng(cfg.rng_seed, kPolicy);

  const scheduler::SchedulerParams sp = cfg.scheduler_params();
  scheduler::SrsPool pool(cfg.p_pilots, trace.initial_pool, -1);
  queueing::QueueState queues(n);

  m.bounds = lyapunov::bound_constants(n, t_frame, budget.r_max_bits,
                                       cfg.traffic.a_max_bits);
  m.n_frames = cfg.n_frames();
  const std::int64_t warmup = cfg.warmup_slots();
  m.warmup_frames = warmup / t_frame;
  m.warmup_windows = warmup / cfg.report_window_slots;
  m.charge_per_reconfig =
      cfg.policy == scheduler::PolicyKind::MJssa ? 0.0 : cfg.cost_c;
  m.frames.reserve(static_cast<std::size_t>(m.n_frames));

  std::vector<double> q_units(n), arrivals(n), offered(n, 0.0), served(n);
  lyapunov::FrameTrace ft;
  ft.slots.resize(static_cast<std::size_t>(t_frame));

  // Window accumulators.
  double win_served = 0.0, win_queue_sum = 0.0;
  std::int64_t win_slots = 0, win_reconfigs = 0;
  std::int64_t reconfigs_so_far = 0;
  double served_so_far = 0.0;
  double post_warmup_served = 0.0;
  double audit_lhs = 0.0, audit_rhs = 0.0;
  std::int64_t audit_ok = 0;

  std::int64_t slot = 0;
  for (std::int64_t f = 0; f < m.n_frames; ++f) {
    const auto q_now = queues.backlog();
    for (std::size_t u = 0; u < n; ++u) q_units[u] = q_now[u] / unit;
    scheduler::FrameDecision d = scheduler::decide(
        cfg.policy, q_units, pool, sp, weight_rate, f, policy_rng);
    pool = d.pool_after;

    FrameRow row;
    row.frame = f;
    row.reconfigured = d.reconfigured;
    row.k_star = d.k_star;
    row.w1 = d.w1;
    row.w2 = d.w2;
    row.cost_charged = cfg.policy == scheduler::PolicyKind::MJssa ? 0.0 : d.cost_charged;
    row.degenerate = d.degenerate;
    if (d.degenerate) ++m.degenerate_frames;
    if (d.reconfigured) {
      ++reconfigs_so_far;
      ++win_reconfigs;
      if (f >= m.warmup_frames) ++m.reconfig_count;
    }

    ft.q_start.assign(q_now.begin(), q_now.end());
    ft.reconfigured = d.reconfigured;

    const std::vector<UserId>& sched = scheduler::schedule_slot(d);
    const int k = static_cast<int>(sched.size());
    std::vector<double> sched_betas;
    if (cfg.phy_validation) {
      for (UserId u : sched) sched_betas.push_back(betas[static_cast<std::size_t>(u)]);
    }

    for (int s = 0; s < t_frame; ++s, ++slot) {
      arrivals_gen.draw(arrival_rng, arrivals);
      std::fill(offered.begin(), offered.end(), 0.0);
      if (k > 0) {
        if (cfg.phy_validation) {
          const phy::ChannelMatrix h =
              phy::draw_small_scale(cfg.m_antennas, sched_betas, channel_rng);
          const phy::PrecoderMatrix w =
              phy::mmse_precoders(h, budget.p_tot_w, budget.noise_w);
          const std::vector<double> r = phy::realized_rates(h, w, budget);
          for (int i = 0; i < k; ++i) {
            offered[static_cast<std::size_t>(sched[i])] = std::floor(r[i]);
          }
        } else {
          for (UserId u : sched) {
            offered[static_cast<std::size_t>(u)] =
                rate_table[k][static_cast<std::size_t>(u)];
          }
        }
      }

      if (opts.check_slot_inequality) {
        const auto q_before = queues.backlog();
        for (std::size_t u = 0; u < n; ++u) {
          if (!lyapunov::check_slot_inequality(q_before[u], offered[u], arrivals[u])) {
            ++m.slot_inequality_violations;
          }
        }
      }

      queues.step(offered, arrivals, served);

      lyapunov::SlotRecord& rec = ft.slots[static_cast<std::size_t>(s)];
      rec.arrivals = arrivals;
      rec.offered = offered;
      rec.served = served;

      double slot_served = 0.0, slot_offered = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        slot_served += served[u];
        slot_offered += offered[u];
      }
      m.wasted_service_bits += slot_offered - slot_served;
      served_so_far += slot_served;
      if (slot >= warmup) post_warmup_served += slot_served;
      win_served += slot_served;
      win_queue_sum += queueing::total_backlog(queues);
      ++win_slots;

      const bool window_done = (slot + 1) % cfg.report_window_slots == 0 ||
                               slot + 1 == cfg.horizon_slots;
      if (window_done) {
        WindowRow w;
        const double elapsed_s = static_cast<double>(slot + 1) * cfg.slot_s;
        w.window_end_s = elapsed_s;
        w.throughput_bps = win_served / (static_cast<double>(win_slots) * cfg.slot_s);
        w.total_queue_bits = win_queue_sum / static_cast<double>(win_slots);
        w.reconfig_flag_count = win_reconfigs;
        w.avg_cost_to_date =
            m.charge_per_reconfig * static_cast<double>(reconfigs_so_far) / elapsed_s;
        w.cumulative_throughput_bps = served_so_far / elapsed_s;
        m.windows.push_back(w);
        win_served = win_queue_sum = 0.0;
        win_slots = win_reconfigs = 0;
      }
    }

    ft.q_end.assign(queues.backlog().begin(), queues.backlog().end());
    row.audit = lyapunov::audit_frame(ft, cfg.v_param, cfg.cost_c, m.bounds, unit);
    audit_lhs += row.audit.lhs;
    audit_rhs += row.audit.rhs;
    if (row.audit.satisfied) ++audit_ok;
    if (opts.keep_slot_records) trace.frame_traces.push_back(ft);
    m.frames.push_back(row);
  }

  const std::int64_t measured_frames = m.n_frames - m.warmup_frames;
  if (measured_frames > 0) {
    m.reconfig_rate = static_cast<double>(m.reconfig_count) /
                      static_cast<double>(measured_frames);
  }
  const double frame_s = cfg.t_frame_slots * cfg.slot_s;
  m.avg_cost = m.charge_per_reconfig * m.reconfig_rate / frame_s;

  double q_weighted = 0.0, q_slots = 0.0;
  for (std::size_t i = static_cast<std::size_t>(m.warmup_windows); i < m.windows.size(); ++i) {
    const double start = i == 0 ? 0.0 : m.windows[i - 1].window_end_s;
    const double len = m.windows[i].window_end_s - start;
    q_weighted += m.windows[i].total_queue_bits * len;
    q_slots += len;
  }
  m.avg_total_queue_bits = q_slots > 0.0 ? q_weighted / q_slots : 0.0;
  const double measured_s =
      static_cast<double>(cfg.horizon_slots - warmup) * cfg.slot_s;
  m.avg_throughput_bps = measured_s > 0.0 ? post_warmup_served / measured_s : 0.0;

  m.total_served_bits = queues.cumulative_served();
  m.total_arrived_bits = queues.cumulative_arrived();
  m.final_backlog_bits = queueing::total_backlog(queues);
  m.truncations = arrivals_gen.truncations();
  if (m.n_frames > 0) {
    m.audit_lhs_mean = audit_lhs / static_cast<double>(m.n_frames);
    m.audit_rhs_mean = audit_rhs / static_cast<double>(m.n_frames);
    m.audit_satisfied_fraction =
        static_cast<double>(audit_ok) / static_cast<double>(m.n_frames);
  }
  return result;
}

std::vector<RunResult> run_sweep(const SimConfig& base,
                                 const std::vector<double>& v_grid, int n_seeds,
                                 unsigned threads) {
  if (v_grid.empty()) throw ConfigError("v_grid", "must not be empty");
  if (n_seeds < 1) throw ConfigError("seeds", "must be >= 1");
  std::vector<SimConfig> cfgs;
  for (double v : v_grid) {
    for (int s = 0; s < n_seeds; ++s) {
      SimConfig c = base;
      c.v_param = v;
      c.rng_seed = base.rng_seed + static_cast<std::uint64_t>(s);
      c.validate();
      cfgs.push_back(c);
    }
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  std::vector<RunResult> out(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      out[i] = run_simulation(cfgs[i]);
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, cfgs.size()); ++t) {
    pool.push_back(std::async(std::launch::async, worker));
  }
  for (auto& f : pool) f.get();
  return out;
}

}  // namespace jssa
