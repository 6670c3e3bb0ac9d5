// Command-line front end. Talks to the simulator only through the C API.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jssa/jssa.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int report(jssa_status st) {
  std::cerr << "jssa: " << jssa_status_name(st) << ": " << jssa_last_error() << "\n";
  return kExitFailure;
}

struct ConfigHandle {
  jssa_config* ptr = nullptr;
  ~ConfigHandle() { jssa_config_destroy(ptr); }
};

void print_summary(const jssa_run_summary& s) {
  std::printf(
      "frames=%lld reconfig_rate=%.4f avg_cost=%.4f avg_queue_bits=%.6g "
      "throughput_bps=%.6g audit_ok=%.4f slot_violations=%lld wall=%.2fs\n",
      static_cast<long long>(s.n_frames), s.reconfig_rate, s.avg_cost,
      s.avg_total_queue_bits, s.avg_throughput_bps, s.audit_satisfied_fraction,
      static_cast<long long>(s.slot_inequality_violations), s.wall_clock_s);
}

int cmd_run(const std::string& config, const std::string& out) {
  ConfigHandle cfg;
  if (auto st = jssa_config_load(config.c_str(), &cfg.ptr); st != JSSA_OK) return report(st);
  jssa_run* run = nullptr;
  if (auto st = jssa_run_simulation(cfg.ptr, &run); st != JSSA_OK) return report(st);
  jssa_run_summary s{};
  jssa_run_get_summary(run, &s);
  const jssa_status st = jssa_run_write_outputs(run, out.c_str());
  jssa_run_destroy(run);
  if (st != JSSA_OK) return report(st);
  print_summary(s);
  return kExitOk;
}

int cmd_sweep(const std::string& config, const std::vector<double>& v_grid, int seeds,
              bool with_mjssa, const std::string& out) {
  ConfigHandle cfg;
  if (auto st = jssa_config_load(config.c_str(), &cfg.ptr); st != JSSA_OK) return report(st);
  jssa_sweep* sweep = nullptr;
  if (auto st = jssa_sweep_run(cfg.ptr, v_grid.data(), v_grid.size(), seeds,
                               with_mjssa ? 1 : 0, &sweep);
      st != JSSA_OK) {
    return report(st);
  }
  jssa_status st = jssa_sweep_write_outputs(sweep, out.c_str());
  if (st == JSSA_OK) {
    for (size_t i = 0; i < jssa_sweep_size(sweep); ++i) {
      jssa_run_summary s{};
      double v = 0.0;
      jssa_sweep_get_summary(sweep, i, &s, &v);
      std::printf("V=%g ", v);
      print_summary(s);
    }
    size_t needed = 0;
    if (jssa_sweep_trend_report(sweep, nullptr, 0, &needed) == JSSA_OK) {
      std::string text(needed, '\0');
      jssa_sweep_trend_report(sweep, text.data(), text.size(), nullptr);
      std::cout << text.c_str();
    }
  }
  jssa_sweep_destroy(sweep);
  return st == JSSA_OK ? kExitOk : report(st);
}

int cmd_plot(const std::string& in, const std::string& out) {
  if (auto st = jssa_emit_plots(in.c_str(), out.c_str()); st != JSSA_OK) return report(st);
  std::printf("wrote %s/fig_throughput.py and %s/fig_queue.py\n", out.c_str(), out.c_str());
  return kExitOk;
}

void print_check(const char* name, int passed, const char* detail, void*) {
  std::printf("%s %s: %s\n", passed ? "PASS" : "FAIL", name, detail);
}

int cmd_verify(const std::string& config) {
  ConfigHandle cfg;
  if (auto st = jssa_config_load(config.c_str(), &cfg.ptr); st != JSSA_OK) return report(st);
  int all_passed = 0;
  if (auto st = jssa_verify(cfg.ptr, print_check, nullptr, &all_passed); st != JSSA_OK) {
    return report(st);
  }
  return all_passed ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint user scheduling and SRS allocation simulator"};
  app.set_version_flag("--version", std::string(jssa_version()));
  app.require_subcommand(1);

  std::string config, out, in;
  std::string v_grid_text;
  int seeds = 1;
  bool with_mjssa = false;

  auto* run = app.add_subcommand("run", "Simulate one configuration");
  run->add_option("--config", config, "Config file")->required();
  run->add_option("--out", out, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Simulate a grid of V values over several seeds");
  sweep->add_option("--config", config, "Base config file")->required();
  sweep->add_option("--v-grid", v_grid_text, "Comma-separated V values")->required();
  sweep->add_option("--seeds", seeds, "Seeds per V, starting at rng_seed")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--with-mjssa", with_mjssa, "Also run the cost-free benchmark per seed");
  sweep->add_option("--out", out, "Output directory")->required();

  auto* plot = app.add_subcommand("plot", "Write plot scripts for saved runs");
  plot->add_option("--in", in, "Directory holding run outputs")->required();
  plot->add_option("--out", out, "Directory for the scripts")->required();

  auto* verify = app.add_subcommand("verify", "Run the built-in self-checks");
  verify->add_option("--config", config, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << jssa_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "jssa: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (*run) return cmd_run(config, out);
  if (*sweep) {
    std::vector<double> v_grid;
    std::stringstream ss(v_grid_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        v_grid.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        std::cerr << "jssa: --v-grid: not a number: '" << item << "'\n\n" << app.help();
        return kExitUsage;
      }
    }
    if (v_grid.empty()) {
      std::cerr << "jssa: --v-grid: empty\n";
      return kExitUsage;
    }
    return cmd_sweep(config, v_grid, seeds, with_mjssa, out);
  }
  if (*plot) return cmd_plot(in, out);
  return cmd_verify(config);
}
