#pragma once

// Config files, result files and plot scripts.
//
// Config grammar: one `key = value` per line, `#` starts a comment, keys may
// be dotted (`traffic.file_size_bits`) or grouped under a `[traffic]` header.
// Unknown and duplicate keys are rejected.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "jssa/engine.hpp"
#include "jssa/lyapunov.hpp"

namespace jssa::io {

inline constexpr std::string_view kCodeVersion = "jssa 0.1.0";

SimConfig parse_config(const std::filesystem::path& path);
SimConfig parse_config_text(std::string_view text,
                            std::string_view source = "<config>");
// Every key at full precision; parse_config_text(write_config(c)) == c.
std::string write_config(const SimConfig& cfg);
bool same_config(const SimConfig& a, const SimConfig& b);

struct RunManifest {
  std::string config_text;
  std::string code_version{kCodeVersion};
  std::uint64_t rng_seed = 0;
  std::vector<std::string> outputs;
  double wall_clock_s = 0.0;
  std::string started_at;  // ISO-8601 UTC
};

struct OutputFiles {
  std::filesystem::path summary;   // summary.json
  std::filesystem::path series;    // series.csv
  std::filesystem::path audit;     // audit.csv
  std::filesystem::path manifest;  // manifest.json
  std::filesystem::path config;    // config.cfg
};

inline constexpr std::string_view kSeriesHeader =
    "window_end_s,throughput_bps,total_queue_bits,reconfig_flag_count,"
    "avg_cost_to_date,cumulative_throughput_bps";
inline constexpr std::string_view kAuditHeader =
    "frame,reconfigured,k_star,w1,w2,cost_charged,degenerate,lyapunov_before,"
    "lyapunov_after,drift,penalty,lhs,rhs,satisfied";

RunManifest make_manifest(const RunResult& run, double wall_clock_s);
// Throws IoError naming the path on failure.
OutputFiles write_outputs(const RunResult& run, RunManifest manifest,
                          const std::filesystem::path& out_dir);

std::vector<WindowRow> read_series_csv(const std::filesystem::path& path);
std::vector<FrameRow> read_audit_csv(const std::filesystem::path& path);

// Writes one sub-directory per run plus sweep_summary.csv and, with at least
// three distinct V among the JSSA runs, trend_report.txt. Returns the run
// directories.
std::vector<std::filesystem::path> write_sweep_outputs(
    const std::vector<RunResult>& runs, const std::vector<double>& wall_clock_s,
    const std::filesystem::path& out_dir);

// Trend report across V over the JSSA runs only, one entry per seed at each
// V. Runs of other policies are ignored.
lyapunov::TrendReport sweep_trend(const std::vector<RunResult>& runs);

std::string run_label(const SimConfig& cfg);

// Finds every series.csv under `in_dir` and writes self-contained
// matplotlib scripts overlaying all runs: fig_throughput.py and
// fig_queue.py. Throws std::invalid_argument when nothing is found or the
// series lengths differ.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& in_dir,
                                              const std::filesystem::path& out_dir);

}  // namespace jssa::io
