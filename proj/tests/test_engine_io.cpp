#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "jssa/engine.hpp"
#include "jssa/errors.hpp"
#include "jssa/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace jssa;

namespace {

SimConfig small_config(std::uint64_t seed = 3) {
  SimConfig c;
  c.n_users = 60;
  c.p_pilots = 20;
  c.horizon_slots = 4000;
  c.rng_seed = seed;
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("jssa_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error_key(const std::string& text) {
  try {
    io::parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("zero traffic leaves everything at zero") {
  SimConfig c = small_config();
  c.traffic.load_scale = 0.0;
  const auto r = run_simulation(c);
  CHECK(r.metrics.total_arrived_bits == 0.0);
  CHECK(r.metrics.total_served_bits == 0.0);
  CHECK(r.metrics.avg_throughput_bps == 0.0);
  CHECK(r.metrics.avg_cost == 0.0);
  CHECK(r.metrics.reconfig_count == 0);
  for (const auto& w : r.metrics.windows) CHECK(w.total_queue_bits == 0.0);
}

TEST_CASE("runs are deterministic in the seed") {
  const auto a = run_simulation(small_config(5));
  const auto b = run_simulation(small_config(5));
  const auto c = run_simulation(small_config(6));
  CHECK(a.metrics.total_served_bits == b.metrics.total_served_bits);
  CHECK(a.metrics.avg_total_queue_bits == b.metrics.avg_total_queue_bits);
  CHECK(a.metrics.reconfig_count == b.metrics.reconfig_count);
  REQUIRE(a.metrics.windows.size() == b.metrics.windows.size());
  for (std::size_t i = 0; i < a.metrics.windows.size(); ++i) {
    CHECK(a.metrics.windows[i].total_queue_bits == b.metrics.windows[i].total_queue_bits);
  }
  CHECK(a.metrics.total_arrived_bits != c.metrics.total_arrived_bits);
}

TEST_CASE("frames and windows tile the horizon") {
  SimConfig c = small_config();
  c.horizon_slots = 2000;
  c.report_window_slots = 30;  // does not divide the horizon
  const auto r = run_simulation(c);
  CHECK(r.metrics.n_frames == 100);
  CHECK(r.metrics.frames.size() == 100);
  CHECK(r.metrics.windows.size() == 67);
  CHECK(r.metrics.windows.back().window_end_s == doctest::Approx(2.0));
  CHECK(c.warmup_slots() % c.t_frame_slots == 0);
  CHECK(c.warmup_slots() % c.report_window_slots == 0);
}

TEST_CASE("bits are conserved exactly and bounds hold") {
  for (auto policy : {scheduler::PolicyKind::Jssa, scheduler::PolicyKind::MJssa,
                      scheduler::PolicyKind::Static, scheduler::PolicyKind::Random}) {
    SimConfig c = small_config();
    c.policy = policy;
    const auto r = run_simulation(c);
    const auto& m = r.metrics;
    CHECK(m.total_arrived_bits - m.total_served_bits == m.final_backlog_bits);
    CHECK(m.slot_inequality_violations == 0);
    CHECK(m.audit_satisfied_fraction == 1.0);
    if (policy == scheduler::PolicyKind::Static || policy == scheduler::PolicyKind::Random) {
      CHECK(m.reconfig_count == 0);
    }
    if (policy == scheduler::PolicyKind::MJssa) {
      CHECK(m.avg_cost == 0.0);
      CHECK(m.reconfig_rate == 1.0);
    }
  }
}

TEST_CASE("slot records reproduce the frame audit") {
  SimConfig c = small_config();
  c.horizon_slots = 400;
  RunOptions opts;
  opts.keep_slot_records = true;
  const auto r = run_simulation(c, opts);
  REQUIRE(r.trace.frame_traces.size() == 20);
  for (std::size_t f = 0; f < 20; ++f) {
    const auto a = lyapunov::audit_frame(r.trace.frame_traces[f], c.v_param, c.cost_c,
                                         r.metrics.bounds, c.weight_unit_bits);
    CHECK(a.lhs == r.metrics.frames[f].audit.lhs);
    CHECK(a.rhs == r.metrics.frames[f].audit.rhs);
  }
}

TEST_CASE("the cost-free benchmark serves at least as much as JSSA on most seeds") {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig c;
    c.horizon_slots = 10000;
    c.rng_seed = seed;
    c.v_param = 20000.0;
    const auto j = run_simulation(c);
    c.policy = scheduler::PolicyKind::MJssa;
    const auto m = run_simulation(c);
    wins += m.metrics.total_served_bits >= j.metrics.total_served_bits;
  }
  CHECK(wins >= 6);
}

TEST_CASE("sweeps share random numbers across V") {
  const SimConfig base = small_config();
  const auto runs = run_sweep(base, {200.0, 20000.0}, 2);
  REQUIRE(runs.size() == 4);
  CHECK(runs[0].config.v_param == 200.0);
  CHECK(runs[1].config.rng_seed == base.rng_seed + 1);
  CHECK(runs[0].metrics.total_arrived_bits == runs[2].metrics.total_arrived_bits);
  CHECK(runs[1].metrics.total_arrived_bits == runs[3].metrics.total_arrived_bits);

  const auto single = run_sweep(base, {base.v_param}, 1);
  const auto direct = run_simulation(base);
  CHECK(single[0].metrics.total_served_bits == direct.metrics.total_served_bits);
  CHECK(single[0].metrics.avg_total_queue_bits == direct.metrics.avg_total_queue_bits);

  CHECK_THROWS_AS(run_sweep(base, {}, 1), ConfigError);
  CHECK_THROWS_AS(run_sweep(base, {200.0}, 0), ConfigError);
}

TEST_CASE("config defaults and validation") {
  const SimConfig empty = io::parse_config_text("");
  CHECK(io::same_config(empty, SimConfig{}));
  CHECK(empty.n_users == 300);
  CHECK(empty.m_antennas == 64);
  CHECK(empty.k_max == 10);
  CHECK(empty.p_pilots == 60);
  CHECK(empty.bandwidth_hz == 20e6);
  CHECK(empty.gamma == 0.8);
  CHECK(empty.p_tot_w == 1.0);
  CHECK(empty.slot_s == 1e-3);
  CHECK(empty.t_frame_slots == 20);

  CHECK(config_error_key("k_max = 10\np_pilots = 5\n") == "p_pilots");
  CHECK(config_error_key("v_param = 0.5\n") == "v_param");
  CHECK(config_error_key("no_such_key = 1\n") == "no_such_key");
  CHECK(config_error_key("v_param = 300\nv_param = 400\n") == "v_param");
  CHECK(config_error_key("m_antennas = lots\n") == "m_antennas");
  CHECK(config_error_key("[traffic]\nfile_size_bits = -3\n") == "traffic.file_size_bits");
  CHECK(config_error_key("policy = greedy\n") == "policy");
  CHECK_THROWS_AS(io::parse_config("/nonexistent/jssa.cfg"), IoError);
}

TEST_CASE("config sections, comments and round trip") {
  const SimConfig c = io::parse_config_text(
      "# comment\nv_param = 2000  # trailing\n[traffic]\nfile_size_bits = 8e5\n"
      "[channel]\nshadow_sigma_db = 8\n");
  CHECK(c.v_param == 2000.0);
  CHECK(c.traffic.file_size_bits == 8e5);
  CHECK(c.traffic.a_max_bits == 4e6);  // follows the file size
  CHECK(c.channel.shadow_sigma_db == 8.0);

  SimConfig odd = c;
  odd.gamma = 0.1 + 0.2;
  odd.policy = scheduler::PolicyKind::MJssa;
  odd.pool_update = scheduler::PoolUpdate::ReplaceAll;
  odd.phy_validation = true;
  CHECK(io::same_config(io::parse_config_text(io::write_config(odd)), odd));
}

TEST_CASE("zero-length run writes headers only") {
  TempDir dir("zero");
  SimConfig c = small_config();
  c.horizon_slots = 0;
  const auto r = run_simulation(c);
  const auto files = io::write_outputs(r, io::make_manifest(r, 0.0), dir.path);
  CHECK(slurp(files.series) == std::string(io::kSeriesHeader) + "\n");
  CHECK(slurp(files.audit) == std::string(io::kAuditHeader) + "\n");
  const auto manifest = nlohmann::json::parse(slurp(files.manifest));
  CHECK(manifest["rng_seed"] == c.rng_seed);
  CHECK(manifest["code_version"] == std::string(io::kCodeVersion));
  CHECK(io::same_config(io::parse_config(files.config), c));
}

TEST_CASE("summary cost is recomputable from the audit CSV") {
  TempDir dir("recompute");
  const auto r = run_simulation(small_config(9));
  const auto files = io::write_outputs(r, io::make_manifest(r, 0.0), dir.path);
  const auto frames = io::read_audit_csv(files.audit);
  const auto summary = nlohmann::json::parse(slurp(files.summary));
  const std::int64_t warmup = summary["warmup_frames"];
  std::int64_t count = 0;
  for (const auto& f : frames) count += f.frame >= warmup && f.reconfigured;
  const double rate = static_cast<double>(count) / static_cast<double>(frames.size() - warmup);
  const double cost = summary["charge_per_reconfig"].get<double>() * rate /
                      summary["frame_s"].get<double>();
  CHECK(count == summary["reconfig_count"]);
  CHECK(cost == summary["avg_cost"].get<double>());

  const auto windows = io::read_series_csv(files.series);
  REQUIRE(windows.size() == r.metrics.windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    CHECK(windows[i].total_queue_bits == r.metrics.windows[i].total_queue_bits);
    CHECK(windows[i].avg_cost_to_date == r.metrics.windows[i].avg_cost_to_date);
  }
}

TEST_CASE("same seed gives byte-identical CSVs") {
  TempDir dir("bytes");
  const auto a = run_simulation(small_config(4));
  const auto b = run_simulation(small_config(4));
  const auto fa = io::write_outputs(a, io::make_manifest(a, 0.1), dir.path / "a");
  const auto fb = io::write_outputs(b, io::make_manifest(b, 0.2), dir.path / "b");
  CHECK(slurp(fa.series) == slurp(fb.series));
  CHECK(slurp(fa.audit) == slurp(fb.audit));
  CHECK(slurp(fa.summary) == slurp(fb.summary));
}

TEST_CASE("sweep outputs and plot scripts") {
  TempDir dir("sweep");
  SimConfig base = small_config();
  auto runs = run_sweep(base, {200.0, 2000.0, 20000.0}, 1);
  SimConfig bench = base;
  bench.policy = scheduler::PolicyKind::MJssa;
  runs.push_back(run_simulation(bench));
  const auto run_dirs =
      io::write_sweep_outputs(runs, std::vector<double>(runs.size(), 0.0), dir.path / "sweep");
  CHECK(run_dirs.size() == 4);
  CHECK(fs::exists(dir.path / "sweep" / "sweep_summary.csv"));
  CHECK(fs::exists(dir.path / "sweep" / "trend_report.txt"));

  const auto scripts = io::emit_plots(dir.path / "sweep", dir.path / "plots");
  REQUIRE(scripts.size() == 2);
  const std::string text = slurp(dir.path / "plots" / "fig_throughput.py");
  CHECK(text.find("matplotlib") != std::string::npos);
  CHECK(text.find("mjssa") != std::string::npos);

  CHECK_THROWS_AS(io::emit_plots(dir.path / "missing", dir.path / "plots"), std::invalid_argument);
  fs::create_directories(dir.path / "empty");
  CHECK_THROWS_AS(io::emit_plots(dir.path / "empty", dir.path / "plots"), std::invalid_argument);

  // A shorter run next to the sweep makes the series lengths disagree.
  SimConfig shorter = base;
  shorter.horizon_slots = 2000;
  const auto s = run_simulation(shorter);
  io::write_outputs(s, io::make_manifest(s, 0.0), dir.path / "sweep" / "short");
  CHECK_THROWS_AS(io::emit_plots(dir.path / "sweep", dir.path / "plots"), std::invalid_argument);
}

TEST_CASE("trend report over a sweep") {
  const auto runs = run_sweep(small_config(), {200.0, 2000.0, 20000.0}, 2);
  const auto report = io::sweep_trend(runs);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].v == 200.0);
  CHECK(report.rows[0].reconfig_mean >= report.rows[2].reconfig_mean);
  const auto two = run_sweep(small_config(), {200.0, 2000.0}, 1);
  CHECK_THROWS_AS(io::sweep_trend(two), std::invalid_argument);

  // A cost-free benchmark run at one of the V values must not enter the trend.
  auto with_bench = runs;
  SimConfig bench = small_config();
  bench.policy = scheduler::PolicyKind::MJssa;
  with_bench.push_back(run_simulation(bench));
  const auto same = io::sweep_trend(with_bench);
  CHECK(same.rows[0].cost_mean == report.rows[0].cost_mean);
  CHECK(same.rows[0].queue_mean == report.rows[0].queue_mean);
}
