#pragma once

// FTP Model 3 traffic: whole files arrive as a Poisson process per user,
// sampled on slot boundaries.

#include <cstdint>
#include <random>
#include <vector>

namespace jssa::traffic {

struct TrafficConfig {
  // Per-user mean file inter-arrival time in seconds. An infinite entry
  // disables that user's traffic.
  std::vector<double> mean_interarrival_s;
  double file_size_bits = 1.6e6;  // 0.2 MB
  double slot_s = 1e-3;
  double a_max_bits = 5 * 1.6e6;

  void validate() const;
  double mean_files_per_slot(std::size_t user) const;
};

// Per-user mean inter-arrival times drawn uniformly in [lo, hi].
std::vector<double> draw_interarrivals(std::size_t users, double lo_s,
                                       double hi_s, std::mt19937_64& rng);

class ArrivalGenerator {
 public:
  explicit ArrivalGenerator(TrafficConfig cfg);

  // Fills `bits` (resized to the user count) with this slot's arrivals.
  void draw(std::mt19937_64& rng, std::vector<double>& bits);
  std::vector<double> draw(std::mt19937_64& rng);

  const TrafficConfig& config() const { return cfg_; }
  std::uint64_t truncations() const { return truncations_; }

 private:
  TrafficConfig cfg_;
  std::vector<std::poisson_distribution<int>> files_;
  std::vector<bool> active_;
  std::uint64_t truncations_ = 0;
};

}  // namespace jssa::traffic
