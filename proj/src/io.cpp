#include "jssa/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "jssa/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace jssa::io {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(v) + "'");
}

struct Field {
  std::function<void(SimConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <typename M>
Field real(M member) {
  return {[member](SimConfig& c, std::string_view k, std::string_view v) {
            member(c) = to_double(k, v);
          },
          [member](const SimConfig& c) {
            SimConfig copy = c;
            return fmt(member(copy));
          }};
}

template <typename Int, typename M>
Field integer(M member) {
  return {[member](SimConfig& c, std::string_view k, std::string_view v) {
            member(c) = to_int<Int>(k, v);
          },
          [member](const SimConfig& c) {
            SimConfig copy = c;
            return std::to_string(member(copy));
          }};
}

#define JSSA_REAL(path) real([](SimConfig& c) -> double& { return c.path; })
#define JSSA_INT(type, path) integer<type>([](SimConfig& c) -> type& { return c.path; })

// Ordered: write_config emits keys in this order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"n_users", JSSA_INT(std::size_t, n_users)},
      {"m_antennas", JSSA_INT(int, m_antennas)},
      {"k_max", JSSA_INT(int, k_max)},
      {"p_pilots", JSSA_INT(std::size_t, p_pilots)},
      {"bandwidth_hz", JSSA_REAL(bandwidth_hz)},
      {"gamma", JSSA_REAL(gamma)},
      {"p_tot_w", JSSA_REAL(p_tot_w)},
      {"slot_s", JSSA_REAL(slot_s)},
      {"t_frame_slots", JSSA_INT(int, t_frame_slots)},
      {"v_param", JSSA_REAL(v_param)},
      {"cost_c", JSSA_REAL(cost_c)},
      {"policy",
       {[](SimConfig& c, std::string_view, std::string_view v) {
          c.policy = scheduler::parse_policy(v);
        },
        [](const SimConfig& c) { return std::string(scheduler::to_string(c.policy)); }}},
      {"pool_update",
       {[](SimConfig& c, std::string_view, std::string_view v) {
          c.pool_update = scheduler::parse_pool_update(v);
        },
        [](const SimConfig& c) { return std::string(scheduler::to_string(c.pool_update)); }}},
      {"horizon_slots", JSSA_INT(std::int64_t, horizon_slots)},
      {"rng_seed", JSSA_INT(std::uint64_t, rng_seed)},
      {"cell_side_m", JSSA_REAL(cell_side_m)},
      {"report_window_slots", JSSA_INT(int, report_window_slots)},
      {"weight_unit_bits", JSSA_REAL(weight_unit_bits)},
      {"phy_validation",
       {[](SimConfig& c, std::string_view k, std::string_view v) {
          c.phy_validation = to_bool(k, v);
        },
        [](const SimConfig& c) { return std::string(c.phy_validation ? "true" : "false"); }}},
      {"warmup_fraction", JSSA_REAL(warmup_fraction)},
      {"traffic.min_interarrival_s", JSSA_REAL(traffic.min_interarrival_s)},
      {"traffic.max_interarrival_s", JSSA_REAL(traffic.max_interarrival_s)},
      {"traffic.file_size_bits", JSSA_REAL(traffic.file_size_bits)},
      {"traffic.a_max_bits", JSSA_REAL(traffic.a_max_bits)},
      {"traffic.load_scale", JSSA_REAL(traffic.load_scale)},
      {"channel.loss_at_1km_db", JSSA_REAL(channel.loss_at_1km_db)},
      {"channel.pathloss_exponent", JSSA_REAL(channel.pathloss_exponent)},
      {"channel.shadow_sigma_db", JSSA_REAL(channel.shadow_sigma_db)},
      {"channel.min_distance_m", JSSA_REAL(channel.min_distance_m)},
      {"channel.noise_figure_db", JSSA_REAL(channel.noise_figure_db)},
  };
  return table;
}

#undef JSSA_REAL
#undef JSSA_INT

const Field* find_field(std::string_view key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) return &f;
  }
  return nullptr;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Rows of a CSV whose first line must equal `header`.
std::vector<std::vector<std::string_view>> csv_rows(const std::string& text,
                                                    std::string_view header,
                                                    const fs::path& path) {
  std::vector<std::vector<std::string_view>> rows;
  std::string_view rest(text);
  bool first = true;
  const std::size_t cols = split(header, ',').size();
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (first) {
      if (line != header) throw IoError(path.string() + ": unexpected CSV header");
      first = false;
      continue;
    }
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != cols) {
      throw IoError(path.string() + ": row has " + std::to_string(cells.size()) +
                    " columns, expected " + std::to_string(cols));
    }
    rows.push_back(std::move(cells));
  }
  if (first) throw IoError(path.string() + ": empty CSV");
  return rows;
}

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string series_csv(const RunMetrics& m) {
  std::string out(kSeriesHeader);
  out += '\n';
  for (const WindowRow& w : m.windows) {
    out += fmt(w.window_end_s) + ',' + fmt(w.throughput_bps) + ',' +
           fmt(w.total_queue_bits) + ',' + std::to_string(w.reconfig_flag_count) +
           ',' + fmt(w.avg_cost_to_date) + ',' + fmt(w.cumulative_throughput_bps) + '\n';
  }
  return out;
}

std::string audit_csv(const RunMetrics& m) {
  std::string out(kAuditHeader);
  out += '\n';
  for (const FrameRow& f : m.frames) {
    const auto& a = f.audit;
    out += std::to_string(f.frame) + ',' + (f.reconfigured ? "1" : "0") + ',' +
           std::to_string(f.k_star) + ',' + fmt(f.w1) + ',' + fmt(f.w2) + ',' +
           fmt(f.cost_charged) + ',' + (f.degenerate ? "1" : "0") + ',' +
           fmt(a.lyapunov_before) + ',' + fmt(a.lyapunov_after) + ',' + fmt(a.drift) +
           ',' + fmt(a.penalty) + ',' + fmt(a.lhs) + ',' + fmt(a.rhs) + ',' +
           (a.satisfied ? "1" : "0") + '\n';
  }
  return out;
}

json summary_json(const RunResult& run) {
  const RunMetrics& m = run.metrics;
  const SimConfig& c = run.config;
  json j;
  j["label"] = run_label(c);
  j["policy"] = std::string(scheduler::to_string(c.policy));
  j["pool_update"] = std::string(scheduler::to_string(c.pool_update));
  j["v_param"] = c.v_param;
  j["cost_c"] = c.cost_c;
  j["rng_seed"] = c.rng_seed;
  j["frame_s"] = c.t_frame_slots * c.slot_s;
  j["n_frames"] = m.n_frames;
  j["warmup_frames"] = m.warmup_frames;
  j["warmup_windows"] = m.warmup_windows;
  j["reconfig_count"] = m.reconfig_count;
  j["reconfig_rate"] = m.reconfig_rate;
  j["charge_per_reconfig"] = m.charge_per_reconfig;
  j["avg_cost"] = m.avg_cost;
  j["avg_total_queue_bits"] = m.avg_total_queue_bits;
  j["avg_throughput_bps"] = m.avg_throughput_bps;
  j["total_served_bits"] = m.total_served_bits;
  j["total_arrived_bits"] = m.total_arrived_bits;
  j["final_backlog_bits"] = m.final_backlog_bits;
  j["wasted_service_bits"] = m.wasted_service_bits;
  j["arrival_truncations"] = m.truncations;
  j["degenerate_frames"] = m.degenerate_frames;
  j["slot_inequality_violations"] = m.slot_inequality_violations;
  j["audit_lhs_mean"] = m.audit_lhs_mean;
  j["audit_rhs_mean"] = m.audit_rhs_mean;
  j["audit_satisfied_fraction"] = m.audit_satisfied_fraction;
  j["bounds"] = {{"b1_bits2", m.bounds.b1},
                 {"b2_bits2", m.bounds.b2},
                 {"r_max_bits", m.bounds.r_max},
                 {"a_max_bits", m.bounds.a_max}};
  return j;
}

}  // namespace

SimConfig parse_config_text(std::string_view text, std::string_view source) {
  SimConfig cfg;
  std::set<std::string> seen;
  std::string section;
  std::size_t line_no = 0;
  std::string_view rest = text;
  auto where = [&] { return std::string(source) + ":" + std::to_string(line_no); };

  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where() + ": expected 'key = value'");
    }
    const std::string_view raw_key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (raw_key.empty()) throw ConfigError(where() + ": missing key");
    const std::string key =
        section.empty() ? std::string(raw_key) : section + "." + std::string(raw_key);
    const Field* f = find_field(key);
    if (!f) throw ConfigError(key, where() + ": unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, where() + ": duplicate key");
    try {
      f->set(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(key, where() + ": " + e.what());
    }
  }
  if (seen.count("traffic.file_size_bits") && !seen.count("traffic.a_max_bits")) {
    cfg.traffic.a_max_bits = 5.0 * cfg.traffic.file_size_bits;
  }
  cfg.validate();
  return cfg;
}

SimConfig parse_config(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("config file not found: " + path.string());
  return parse_config_text(read_text(path), path.string());
}

std::string write_config(const SimConfig& cfg) {
  std::string out;
  for (const auto& [name, f] : fields()) out += name + " = " + f.get(cfg) + "\n";
  return out;
}

bool same_config(const SimConfig& a, const SimConfig& b) {
  return write_config(a) == write_config(b);
}

std::string run_label(const SimConfig& cfg) {
  std::string label(scheduler::to_string(cfg.policy));
  if (cfg.policy == scheduler::PolicyKind::Jssa) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " V=%g", cfg.v_param);
    label += buf;
  }
  return label;
}

RunManifest make_manifest(const RunResult& run, double wall_clock_s) {
  RunManifest m;
  m.config_text = write_config(run.config);
  m.rng_seed = run.config.rng_seed;
  m.wall_clock_s = wall_clock_s;
  m.started_at = iso_now();
  return m;
}

OutputFiles write_outputs(const RunResult& run, RunManifest manifest,
                          const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  OutputFiles files;
  files.summary = out_dir / "summary.json";
  files.series = out_dir / "series.csv";
  files.audit = out_dir / "audit.csv";
  files.manifest = out_dir / "manifest.json";
  files.config = out_dir / "config.cfg";

  write_text(files.summary, summary_json(run).dump(2) + "\n");
  write_text(files.series, series_csv(run.metrics));
  write_text(files.audit, audit_csv(run.metrics));
  write_text(files.config, write_config(run.config));

  manifest.outputs = {files.summary.string(), files.series.string(),
                      files.audit.string(), files.config.string()};
  json mj;
  mj["code_version"] = manifest.code_version;
  mj["rng_seed"] = manifest.rng_seed;
  mj["config"] = manifest.config_text;
  mj["outputs"] = manifest.outputs;
  mj["wall_clock_s"] = manifest.wall_clock_s;
  mj["started_at"] = manifest.started_at;
  write_text(files.manifest, mj.dump(2) + "\n");
  return files;
}

std::vector<WindowRow> read_series_csv(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<WindowRow> out;
  for (const auto& c : csv_rows(text, kSeriesHeader, path)) {
    WindowRow w;
    w.window_end_s = to_double("window_end_s", c[0]);
    w.throughput_bps = to_double("throughput_bps", c[1]);
    w.total_queue_bits = to_double("total_queue_bits", c[2]);
    w.reconfig_flag_count = to_int<std::int64_t>("reconfig_flag_count", c[3]);
    w.avg_cost_to_date = to_double("avg_cost_to_date", c[4]);
    w.cumulative_throughput_bps = to_double("cumulative_throughput_bps", c[5]);
    out.push_back(w);
  }
  return out;
}

std::vector<FrameRow> read_audit_csv(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<FrameRow> out;
  for (const auto& c : csv_rows(text, kAuditHeader, path)) {
    FrameRow f;
    f.frame = to_int<std::int64_t>("frame", c[0]);
    f.reconfigured = c[1] == "1";
    f.k_star = to_int<int>("k_star", c[2]);
    f.w1 = to_double("w1", c[3]);
    f.w2 = to_double("w2", c[4]);
    f.cost_charged = to_double("cost_charged", c[5]);
    f.degenerate = c[6] == "1";
    f.audit.lyapunov_before = to_double("lyapunov_before", c[7]);
    f.audit.lyapunov_after = to_double("lyapunov_after", c[8]);
    f.audit.drift = to_double("drift", c[9]);
    f.audit.penalty = to_double("penalty", c[10]);
    f.audit.lhs = to_double("lhs", c[11]);
    f.audit.rhs = to_double("rhs", c[12]);
    f.audit.satisfied = c[13] == "1";
    out.push_back(f);
  }
  return out;
}

lyapunov::TrendReport sweep_trend(const std::vector<RunResult>& runs) {
  std::map<double, lyapunov::TrendPoint> by_v;
  double b2 = 0.0;
  for (const RunResult& r : runs) {
    if (r.config.policy != scheduler::PolicyKind::Jssa) continue;
    auto& p = by_v[r.config.v_param];
    p.v = r.config.v_param;
    p.avg_cost.push_back(r.metrics.avg_cost);
    p.reconfig_rate.push_back(r.metrics.reconfig_rate);
    p.avg_total_queue.push_back(r.metrics.avg_total_queue_bits);
    const double unit = r.config.weight_unit_bits;
    b2 = r.metrics.bounds.b2 / (unit * unit);
  }
  std::vector<lyapunov::TrendPoint> points;
  for (auto& [_, p] : by_v) points.push_back(std::move(p));
  return lyapunov::tradeoff_report(std::move(points), b2);
}

std::vector<fs::path> write_sweep_outputs(const std::vector<RunResult>& runs,
                                          const std::vector<double>& wall_clock_s,
                                          const fs::path& out_dir) {
  std::vector<fs::path> dirs;
  std::string table =
      "policy,pool_update,v_param,rng_seed,reconfig_rate,avg_cost,"
      "avg_total_queue_bits,avg_throughput_bps\n";
  std::set<double> vs;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const RunResult& r = runs[i];
    const SimConfig& c = r.config;
    char name[128];
    std::snprintf(name, sizeof name, "%s_v%g_seed%llu",
                  std::string(scheduler::to_string(c.policy)).c_str(), c.v_param,
                  static_cast<unsigned long long>(c.rng_seed));
    const fs::path dir = out_dir / name;
    write_outputs(r, make_manifest(r, i < wall_clock_s.size() ? wall_clock_s[i] : 0.0), dir);
    dirs.push_back(dir);
    if (c.policy == scheduler::PolicyKind::Jssa) vs.insert(c.v_param);
    table += std::string(scheduler::to_string(c.policy)) + ',' +
             std::string(scheduler::to_string(c.pool_update)) + ',' + fmt(c.v_param) +
             ',' + std::to_string(c.rng_seed) + ',' + fmt(r.metrics.reconfig_rate) +
             ',' + fmt(r.metrics.avg_cost) + ',' + fmt(r.metrics.avg_total_queue_bits) +
             ',' + fmt(r.metrics.avg_throughput_bps) + '\n';
  }
  write_text(out_dir / "sweep_summary.csv", table);
  if (vs.size() >= 3) write_text(out_dir / "trend_report.txt", sweep_trend(runs).to_text());
  return dirs;
}

std::vector<fs::path> emit_plots(const fs::path& in_dir, const fs::path& out_dir) {
  if (!fs::is_directory(in_dir)) {
    throw std::invalid_argument("plot: input directory not found: " + in_dir.string());
  }
  std::vector<fs::path> series;
  for (const auto& e : fs::recursive_directory_iterator(in_dir)) {
    if (e.is_regular_file() && e.path().filename() == "series.csv") {
      series.push_back(e.path());
    }
  }
  std::sort(series.begin(), series.end());
  if (series.empty()) {
    throw std::invalid_argument("plot: no series.csv under " + in_dir.string() +
                                " (run `jssa run` or `jssa sweep` first)");
  }

  struct Curve {
    std::string label;
    std::vector<WindowRow> rows;
  };
  std::vector<Curve> curves;
  for (const fs::path& p : series) {
    Curve c;
    c.rows = read_series_csv(p);
    c.label = p.parent_path().filename().string();
    const fs::path summary = p.parent_path() / "summary.json";
    if (fs::exists(summary)) {
      const json j = json::parse(read_text(summary));
      c.label = j.value("label", c.label);
      if (j.contains("rng_seed") && series.size() > 1) {
        c.label += " seed " + std::to_string(j["rng_seed"].get<std::uint64_t>());
      }
    }
    if (!curves.empty() && c.rows.size() != curves.front().rows.size()) {
      throw std::invalid_argument("plot: series lengths differ (" +
                                  std::to_string(c.rows.size()) + " rows in " +
                                  p.string() + ", " +
                                  std::to_string(curves.front().rows.size()) +
                                  " in the first series)");
    }
    curves.push_back(std::move(c));
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  auto script = [&](const std::string& stem, const std::string& ylabel,
                    const std::string& title, double scale, auto value) {
    std::ostringstream py;
    py << "#!/usr/bin/env python3\n"
       << "# Generated by " << kCodeVersion << ". Writes " << stem << ".png next to this script.\n"
       << "import os\nimport matplotlib\nmatplotlib.use('Agg')\n"
       << "import matplotlib.pyplot as plt\n\ncurves = [\n";
    for (const Curve& c : curves) {
      py << "    (" << json(c.label).dump() << ", [";
      for (std::size_t i = 0; i < c.rows.size(); ++i) {
        py << (i ? ", " : "") << fmt(c.rows[i].window_end_s);
      }
      py << "], [";
      for (std::size_t i = 0; i < c.rows.size(); ++i) {
        py << (i ? ", " : "") << fmt(value(c.rows[i]) / scale);
      }
      py << "]),\n";
    }
    py << "]\n\nfig, ax = plt.subplots(figsize=(7, 4))\n"
       << "for label, t, y in curves:\n    ax.plot(t, y, label=label)\n"
       << "ax.set_xlabel('time (s)')\nax.set_ylabel(" << json(ylabel).dump() << ")\n"
       << "ax.set_title(" << json(title).dump() << ")\n"
       << "ax.grid(True, alpha=0.3)\nax.legend()\nfig.tight_layout()\n"
       << "fig.savefig(os.path.join(os.path.dirname(os.path.abspath(__file__)), '"
       << stem << ".png'), dpi=150)\n";
    const fs::path path = out_dir / (stem + ".py");
    write_text(path, py.str());
    return path;
  };

  return {
      script("fig_throughput", "throughput (Mbit/s)",
             "Time-averaged total throughput", 1e6,
             [](const WindowRow& w) { return w.throughput_bps; }),
      script("fig_queue", "total queue (Mbit)", "Time-averaged total queue size", 1e6,
             [](const WindowRow& w) { return w.total_queue_bits; }),
  };
}

}  // namespace jssa::io
