#include "jssa/traffic.hpp"

#include <cmath>

#include "jssa/errors.hpp"

namespace jssa::traffic {

void TrafficConfig::validate() const {
  for (double m : mean_interarrival_s) {
    if (!(m > 0.0)) {
      throw ConfigError("traffic.mean_interarrival_s", "must be positive");
    }
  }
  if (!(file_size_bits > 0.0)) {
    throw ConfigError("traffic.file_size_bits", "must be positive");
  }
  if (!(slot_s > 0.0)) throw ConfigError("slot_s", "must be positive");
  if (!(a_max_bits >= file_size_bits)) {
    throw ConfigError("traffic.a_max_bits", "must be >= file_size_bits");
  }
}

double TrafficConfig::mean_files_per_slot(std::size_t user) const {
  const double m = mean_interarrival_s.at(user);
  return std::isinf(m) ? 0.0 : slot_s / m;
}

std::vector<double> draw_interarrivals(std::size_t users, double lo_s,
                                       double hi_s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo_s, hi_s);
  std::vector<double> out(users);
  for (double& m : out) m = dist(rng);
  return out;
}

ArrivalGenerator::ArrivalGenerator(TrafficConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const std::size_t n = cfg_.mean_interarrival_s.size();
  files_.reserve(n);
  active_.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    const double mean = cfg_.mean_files_per_slot(u);
    active_[u] = mean > 0.0;
    files_.emplace_back(active_[u] ? mean : 1.0);
  }
}

void ArrivalGenerator::draw(std::mt19937_64& rng, std::vector<double>& bits) {
  const std::size_t n = files_.size();
  bits.assign(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    if (!active_[u]) continue;
    const int count = files_[u](rng);
    if (count == 0) continue;
    double b = count * cfg_.file_size_bits;
    if (b > cfg_.a_max_bits) {
      b = cfg_.a_max_bits;
      ++truncations_;
    }
    bits[u] = b;
  }
}

std::vector<double> ArrivalGenerator::draw(std::mt19937_64& rng) {
  std::vector<double> bits;
  draw(rng, bits);
  return bits;
}

}  // namespace jssa::traffic
