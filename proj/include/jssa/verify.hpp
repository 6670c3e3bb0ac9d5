#pragma once

// Self-checks behind `jssa verify`.

#include <cstdint>
#include <string>
#include <vector>

#include "jssa/engine.hpp"

namespace jssa::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// best_over_k against exhaustive_oracle on random states with N = 12,
// K = min(cfg.k_max, 4), queues in [0, 1e7] bits, gains spread over 40 dB.
CheckResult oracle_equivalence(const SimConfig& cfg, int states, std::uint64_t seed);

// Slot inequality on a 21^3 grid over [0, 10]^3 plus random triples.
CheckResult slot_inequality(int random_triples, std::uint64_t seed);

CheckResult bound_identity(const SimConfig& cfg);

// Short run of cfg: zero slot-inequality violations, every frame audit
// satisfied, exact bit conservation.
CheckResult short_run_audit(const SimConfig& cfg, std::int64_t horizon_slots);

std::vector<CheckResult> run_all(const SimConfig& cfg);

}  // namespace jssa::verify
