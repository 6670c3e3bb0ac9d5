#pragma once

// Frame-level pilot (SRS) allocation and user selection.
//
// Every policy works on the same per-frame snapshot: queue backlogs Q_n(t)
// and a rate oracle R_n(k) giving user n's rate when k users share the
// downlink with power P_tot/k. A selection's weight is sum Q_n R_n(|S|),
// always summed in ascending user-id order so that independently computed
// weights of the same set compare bit-exactly.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace jssa::scheduler {

using UserId = std::int32_t;
using RateFn = std::function<double(UserId user, int k)>;

struct CandidateSelection {
  std::vector<UserId> users;  // ascending ids
  int k = 0;
  double weight = 0.0;
};

// Users currently holding a pilot, with the frame each was last assigned.
class SrsPool {
 public:
  SrsPool() = default;
  explicit SrsPool(std::size_t capacity) : capacity_(capacity) {}
  SrsPool(std::size_t capacity, std::span<const UserId> members,
          std::int64_t frame = -1);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return last_assigned_.size(); }
  bool empty() const { return last_assigned_.empty(); }
  bool contains(UserId u) const { return last_assigned_.count(u) != 0; }
  std::int64_t last_assigned(UserId u) const { return last_assigned_.at(u); }
  std::vector<UserId> members() const;

  // Adds `users` stamped with `frame`, then evicts the least recently
  // assigned members (lowest id first among equals) until size <= capacity.
  void assign_lru(std::span<const UserId> users, std::int64_t frame);
  // Pool becomes exactly `users` (truncated to capacity).
  void replace_all(std::span<const UserId> users, std::int64_t frame);

  bool operator==(const SrsPool& other) const {
    return capacity_ == other.capacity_ &&
           last_assigned_ == other.last_assigned_;
  }

 private:
  std::size_t capacity_ = 0;
  std::map<UserId, std::int64_t> last_assigned_;
};

enum class PoolUpdate { ReplaceLru, ReplaceAll };
enum class PolicyKind { Jssa, MJssa, Static, Random };

std::string_view to_string(PoolUpdate p);
std::string_view to_string(PolicyKind p);
// Throw ConfigError on unknown names.
PoolUpdate parse_pool_update(std::string_view name);
PolicyKind parse_policy(std::string_view name);

struct SchedulerParams {
  double v = 200.0;
  double cost = 1.0;
  int t_frame = 20;
  int k_max = 10;
  std::size_t pilots = 60;
  PoolUpdate pool_update = PoolUpdate::ReplaceLru;

  double threshold() const { return cost * v / t_frame; }
};

struct FrameDecision {
  bool reconfigured = false;
  SrsPool pool_after;
  std::vector<UserId> scheduled;  // ascending ids
  int k_star = 0;
  double w1 = 0.0;
  double w2 = 0.0;
  double cost_charged = 0.0;
  bool degenerate = false;  // nothing schedulable this frame
};

// The k pool members with the largest Q_n R_n(k). Ties go to the
// lower id. A pool smaller than k is returned whole, rated at its own size.
CandidateSelection best_set_for_k(std::span<const double> q,
                                  std::span<const UserId> pool, int k,
                                  const RateFn& rate);

// best_set_for_k over k = 1..K; ties go to the smaller k.
CandidateSelection best_over_k(std::span<const double> q,
                               std::span<const UserId> pool, int k_max,
                               const RateFn& rate);

// Brute-force maximizer of sum Q_n R_n(|S|) over all nonempty subsets of
// size <= K. Refuses (std::invalid_argument) when |pool| > 16 or K > 6.
CandidateSelection exhaustive_oracle(std::span<const double> q,
                                     std::span<const UserId> pool, int k_max,
                                     const RateFn& rate);

std::vector<UserId> all_users(std::size_t n);

// One frame of JSSA: reconfigure when W1 - C V / T > W2, else keep the pool.
// Requires V > 1, C >= 0, T >= 1.
FrameDecision jssa_frame_decision(std::span<const double> q,
                                  const SrsPool& pool,
                                  const SchedulerParams& params,
                                  const RateFn& rate, std::int64_t frame);

// Cost-free benchmark: always adopts the global best set.
FrameDecision mjssa_frame_decision(std::span<const double> q,
                                   const SrsPool& pool,
                                   const SchedulerParams& params,
                                   const RateFn& rate, std::int64_t frame);

FrameDecision static_frame_decision(std::span<const double> q,
                                    const SrsPool& pool,
                                    const SchedulerParams& params,
                                    const RateFn& rate);

FrameDecision random_frame_decision(const SrsPool& pool,
                                    const SchedulerParams& params,
                                    std::mt19937_64& rng);

FrameDecision decide(PolicyKind policy, std::span<const double> q,
                     const SrsPool& pool, const SchedulerParams& params,
                     const RateFn& rate, std::int64_t frame,
                     std::mt19937_64& rng);

// The frame's set is used unchanged in every slot.
inline const std::vector<UserId>& schedule_slot(const FrameDecision& d) {
  return d.scheduled;
}

}  // namespace jssa::scheduler
