#include "jssa/jssa.h"

#include <chrono>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "jssa/engine.hpp"
#include "jssa/errors.hpp"
#include "jssa/io.hpp"
#include "jssa/verify.hpp"

struct jssa_config {
  jssa::SimConfig cfg;
};

struct jssa_run {
  jssa::RunResult result;
  double wall_clock_s = 0.0;
};

struct jssa_sweep {
  std::vector<jssa::RunResult> runs;
  std::vector<double> wall_clock_s;
};

namespace {

thread_local std::string g_last_error;

jssa_status fail(jssa_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Maps the core's exceptions onto status codes.
template <typename F>
jssa_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return JSSA_OK;
  } catch (const jssa::ConfigError& e) {
    return fail(JSSA_ERR_CONFIG, e.what());
  } catch (const jssa::IoError& e) {
    return fail(JSSA_ERR_IO, e.what());
  } catch (const jssa::NumericError& e) {
    return fail(JSSA_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(JSSA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(JSSA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(JSSA_ERR_INTERNAL, e.what());
  }
}

jssa_status copy_out(const std::string& text, char* buf, size_t buf_len,
                     size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf && buf_len > 0) {
    const size_t n = std::min(buf_len - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
  return JSSA_OK;
}

jssa_run_summary summarize(const jssa::RunResult& r, double wall_clock_s) {
  const jssa::RunMetrics& m = r.metrics;
  jssa_run_summary s{};
  s.n_frames = m.n_frames;
  s.warmup_frames = m.warmup_frames;
  s.reconfig_count = m.reconfig_count;
  s.reconfig_rate = m.reconfig_rate;
  s.avg_cost = m.avg_cost;
  s.avg_total_queue_bits = m.avg_total_queue_bits;
  s.avg_throughput_bps = m.avg_throughput_bps;
  s.total_served_bits = m.total_served_bits;
  s.total_arrived_bits = m.total_arrived_bits;
  s.final_backlog_bits = m.final_backlog_bits;
  s.wasted_service_bits = m.wasted_service_bits;
  s.audit_satisfied_fraction = m.audit_satisfied_fraction;
  s.slot_inequality_violations = m.slot_inequality_violations;
  s.wall_clock_s = wall_clock_s;
  return s;
}

#define JSSA_REQUIRE(ptr)                                                  \
  do {                                                                     \
    if (!(ptr)) return fail(JSSA_ERR_INVALID_ARGUMENT, #ptr " is null"); \
  } while (0)

}  // namespace

extern "C" {

const char* jssa_version(void) { return jssa::io::kCodeVersion.data(); }

const char* jssa_last_error(void) { return g_last_error.c_str(); }

const char* jssa_status_name(jssa_status status) {
  switch (status) {
    case JSSA_OK: return "ok";
    case JSSA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case JSSA_ERR_CONFIG: return "configuration error";
    case JSSA_ERR_IO: return "I/O error";
    case JSSA_ERR_NUMERIC: return "numeric error";
    case JSSA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

jssa_status jssa_config_default(jssa_config** out) {
  JSSA_REQUIRE(out);
  return guarded([&] { *out = new jssa_config{}; });
}

jssa_status jssa_config_load(const char* path, jssa_config** out) {
  JSSA_REQUIRE(path);
  JSSA_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new jssa_config{jssa::io::parse_config(path)}; });
}

jssa_status jssa_config_parse(const char* text, jssa_config** out) {
  JSSA_REQUIRE(text);
  JSSA_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new jssa_config{jssa::io::parse_config_text(text)}; });
}

jssa_status jssa_config_set(jssa_config* cfg, const char* key, const char* value) {
  JSSA_REQUIRE(cfg);
  JSSA_REQUIRE(key);
  JSSA_REQUIRE(value);
  return guarded([&] {
    // Rewrite the whole config with the one key replaced so the usual
    // parser (and its validation) applies.
    const std::string current = jssa::io::write_config(cfg->cfg);
    std::string updated;
    bool found = false;
    std::size_t start = 0;
    while (start < current.size()) {
      const auto nl = current.find('\n', start);
      const std::string line = current.substr(start, nl - start);
      start = nl == std::string::npos ? current.size() : nl + 1;
      if (line.rfind(std::string(key) + " = ", 0) == 0) {
        updated += std::string(key) + " = " + value + "\n";
        found = true;
      } else {
        updated += line + "\n";
      }
    }
    if (!found) throw jssa::ConfigError(key, "unknown key");
    cfg->cfg = jssa::io::parse_config_text(updated);
  });
}

jssa_status jssa_config_write(const jssa_config* cfg, char* buf, size_t buf_len,
                              size_t* needed) {
  JSSA_REQUIRE(cfg);
  return copy_out(jssa::io::write_config(cfg->cfg), buf, buf_len, needed);
}

void jssa_config_destroy(jssa_config* cfg) { delete cfg; }

jssa_status jssa_run_simulation(const jssa_config* cfg, jssa_run** out) {
  JSSA_REQUIRE(cfg);
  JSSA_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    auto run = std::make_unique<jssa_run>();
    run->result = jssa::run_simulation(cfg->cfg);
    run->wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    *out = run.release();
  });
}

jssa_status jssa_run_get_summary(const jssa_run* run, jssa_run_summary* out) {
  JSSA_REQUIRE(run);
  JSSA_REQUIRE(out);
  *out = summarize(run->result, run->wall_clock_s);
  return JSSA_OK;
}

jssa_status jssa_run_write_outputs(const jssa_run* run, const char* out_dir) {
  JSSA_REQUIRE(run);
  JSSA_REQUIRE(out_dir);
  return guarded([&] {
    jssa::io::write_outputs(run->result,
                            jssa::io::make_manifest(run->result, run->wall_clock_s),
                            out_dir);
  });
}

void jssa_run_destroy(jssa_run* run) { delete run; }

jssa_status jssa_sweep_run(const jssa_config* base, const double* v_grid, size_t n_v,
                           int n_seeds, int include_mjssa, jssa_sweep** out) {
  JSSA_REQUIRE(base);
  JSSA_REQUIRE(v_grid);
  JSSA_REQUIRE(out);
  *out = nullptr;
  if (n_v == 0) return fail(JSSA_ERR_INVALID_ARGUMENT, "empty V grid");
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    auto sweep = std::make_unique<jssa_sweep>();
    sweep->runs = jssa::run_sweep(base->cfg, std::vector<double>(v_grid, v_grid + n_v),
                                  n_seeds);
    if (include_mjssa) {
      jssa::SimConfig bench = base->cfg;
      bench.policy = jssa::scheduler::PolicyKind::MJssa;
      auto extra = jssa::run_sweep(bench, {bench.v_param}, n_seeds);
      for (auto& r : extra) sweep->runs.push_back(std::move(r));
    }
    const double per_run =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
        static_cast<double>(sweep->runs.size());
    sweep->wall_clock_s.assign(sweep->runs.size(), per_run);
    *out = sweep.release();
  });
}

size_t jssa_sweep_size(const jssa_sweep* sweep) {
  return sweep ? sweep->runs.size() : 0;
}

jssa_status jssa_sweep_get_summary(const jssa_sweep* sweep, size_t index,
                                   jssa_run_summary* out, double* v_param) {
  JSSA_REQUIRE(sweep);
  JSSA_REQUIRE(out);
  if (index >= sweep->runs.size()) {
    return fail(JSSA_ERR_INVALID_ARGUMENT, "sweep index out of range");
  }
  *out = summarize(sweep->runs[index], sweep->wall_clock_s[index]);
  if (v_param) *v_param = sweep->runs[index].config.v_param;
  return JSSA_OK;
}

jssa_status jssa_sweep_trend_report(const jssa_sweep* sweep, char* buf, size_t buf_len,
                                    size_t* needed) {
  JSSA_REQUIRE(sweep);
  std::string text;
  const jssa_status st =
      guarded([&] { text = jssa::io::sweep_trend(sweep->runs).to_text(); });
  if (st != JSSA_OK) return st;
  return copy_out(text, buf, buf_len, needed);
}

jssa_status jssa_sweep_write_outputs(const jssa_sweep* sweep, const char* out_dir) {
  JSSA_REQUIRE(sweep);
  JSSA_REQUIRE(out_dir);
  return guarded(
      [&] { jssa::io::write_sweep_outputs(sweep->runs, sweep->wall_clock_s, out_dir); });
}

void jssa_sweep_destroy(jssa_sweep* sweep) { delete sweep; }

jssa_status jssa_emit_plots(const char* in_dir, const char* out_dir) {
  JSSA_REQUIRE(in_dir);
  JSSA_REQUIRE(out_dir);
  return guarded([&] { jssa::io::emit_plots(in_dir, out_dir); });
}

jssa_status jssa_verify(const jssa_config* cfg, jssa_check_callback on_check, void* user,
                        int* all_passed) {
  JSSA_REQUIRE(cfg);
  return guarded([&] {
    const auto checks = jssa::verify::run_all(cfg->cfg);
    bool ok = true;
    for (const auto& c : checks) {
      ok = ok && c.passed;
      if (on_check) on_check(c.name.c_str(), c.passed ? 1 : 0, c.detail.c_str(), user);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
