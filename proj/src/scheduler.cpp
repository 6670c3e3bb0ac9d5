#include "jssa/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "jssa/errors.hpp"

namespace jssa::scheduler {

namespace {

double set_weight(std::span<const double> q, std::span<const UserId> sorted_users,
                  int k, const RateFn& rate) {
  double w = 0.0;
  for (UserId u : sorted_users) w += q[static_cast<std::size_t>(u)] * rate(u, k);
  return w;
}

void check_params(const SchedulerParams& p) {
  if (!(p.v > 1.0)) throw ConfigError("v_param", "requires V > 1");
  if (!(p.cost >= 0.0)) throw ConfigError("cost_c", "must be >= 0");
  if (p.t_frame < 1) throw ConfigError("t_frame_slots", "must be >= 1");
  if (p.k_max < 1) throw ConfigError("k_max", "must be >= 1");
}

void apply_pool_update(SrsPool& pool, PoolUpdate mode,
                       std::span<const UserId> users, std::int64_t frame) {
  if (mode == PoolUpdate::ReplaceLru) {
    pool.assign_lru(users, frame);
  } else {
    pool.replace_all(users, frame);
  }
}

}  // namespace

SrsPool::SrsPool(std::size_t capacity, std::span<const UserId> members,
                 std::int64_t frame)
    : capacity_(capacity) {
  replace_all(members, frame);
}

std::vector<UserId> SrsPool::members() const {
  std::vector<UserId> out;
  out.reserve(last_assigned_.size());
  for (const auto& [u, _] : last_assigned_) out.push_back(u);
  return out;
}

void SrsPool::assign_lru(std::span<const UserId> users, std::int64_t frame) {
  for (UserId u : users) last_assigned_[u] = frame;
  if (last_assigned_.size() <= capacity_) return;
  std::vector<std::pair<std::int64_t, UserId>> order;
  order.reserve(last_assigned_.size());
  for (const auto& [u, f] : last_assigned_) order.emplace_back(f, u);
  std::sort(order.begin(), order.end());
  const std::size_t excess = last_assigned_.size() - capacity_;
  for (std::size_t i = 0; i < excess; ++i) last_assigned_.erase(order[i].second);
}

void SrsPool::replace_all(std::span<const UserId> users, std::int64_t frame) {
  last_assigned_.clear();
  for (UserId u : users) {
    if (last_assigned_.size() >= capacity_) break;
    last_assigned_[u] = frame;
  }
}

std::string_view to_string(PoolUpdate p) {
  return p == PoolUpdate::ReplaceLru ? "replace-lru" : "replace-all";
}

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::Jssa: return "jssa";
    case PolicyKind::MJssa: return "mjssa";
    case PolicyKind::Static: return "static";
    case PolicyKind::Random: return "random";
  }
  return "?";
}

PoolUpdate parse_pool_update(std::string_view name) {
  if (name == "replace-lru") return PoolUpdate::ReplaceLru;
  if (name == "replace-all") return PoolUpdate::ReplaceAll;
  throw ConfigError("pool_update", "unknown mode '" + std::string(name) +
                                       "' (expected replace-lru|replace-all)");
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "jssa") return PolicyKind::Jssa;
  if (name == "mjssa") return PolicyKind::MJssa;
  if (name == "static") return PolicyKind::Static;
  if (name == "random") return PolicyKind::Random;
  throw ConfigError("policy", "unknown policy '" + std::string(name) +
                                  "' (expected jssa|mjssa|static|random)");
}

CandidateSelection best_set_for_k(std::span<const double> q,
                                  std::span<const UserId> pool, int k,
                                  const RateFn& rate) {
  CandidateSelection sel;
  if (pool.empty() || k < 1) return sel;
  const int size = std::min<int>(k, static_cast<int>(pool.size()));

  struct Scored {
    double w;
    UserId u;
  };
  std::vector<Scored> scored;
  scored.reserve(pool.size());
  for (UserId u : pool) {
    scored.push_back({q[static_cast<std::size_t>(u)] * rate(u, size), u});
  }
  auto better = [](const Scored& a, const Scored& b) {
    return a.w != b.w ? a.w > b.w : a.u < b.u;
  };
  std::nth_element(scored.begin(), scored.begin() + (size - 1), scored.end(),
                   better);
  sel.users.reserve(size);
  for (int i = 0; i < size; ++i) sel.users.push_back(scored[i].u);
  std::sort(sel.users.begin(), sel.users.end());
  sel.k = size;
  sel.weight = set_weight(q, sel.users, size, rate);
  return sel;
}

CandidateSelection best_over_k(std::span<const double> q,
                               std::span<const UserId> pool, int k_max,
                               const RateFn& rate) {
  CandidateSelection best;
  const int upper = std::min<int>(k_max, static_cast<int>(pool.size()));
  for (int k = 1; k <= upper; ++k) {
    CandidateSelection cand = best_set_for_k(q, pool, k, rate);
    if (k == 1 || cand.weight > best.weight) best = std::move(cand);
  }
  return best;
}

CandidateSelection exhaustive_oracle(std::span<const double> q,
                                     std::span<const UserId> pool, int k_max,
                                     const RateFn& rate) {
  if (pool.size() > 16 || k_max > 6) {
    throw std::invalid_argument(
        "exhaustive_oracle: instance too large to enumerate");
  }
  std::vector<UserId> ids(pool.begin(), pool.end());
  std::sort(ids.begin(), ids.end());
  const int n = static_cast<int>(ids.size());
  const int upper = std::min(k_max, n);

  CandidateSelection best;
  bool found = false;
  std::vector<UserId> subset;
  // Sizes ascending, each size in lexicographic order of index tuples.
  for (int size = 1; size <= upper; ++size) {
    std::vector<int> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      subset.clear();
      for (int i : idx) subset.push_back(ids[i]);
      const double w = set_weight(q, subset, size, rate);
      if (!found || w > best.weight) {
        best.users = subset;
        best.k = size;
        best.weight = w;
        found = true;
      }
      int pos = size - 1;
      while (pos >= 0 && idx[pos] == n - size + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int j = pos + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return best;
}

std::vector<UserId> all_users(std::size_t n) {
  std::vector<UserId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

FrameDecision jssa_frame_decision(std::span<const double> q,
                                  const SrsPool& pool,
                                  const SchedulerParams& params,
                                  const RateFn& rate, std::int64_t frame) {
  check_params(params);
  const CandidateSelection s1 =
      best_over_k(q, all_users(q.size()), params.k_max, rate);
  const CandidateSelection s2 =
      best_over_k(q, pool.members(), params.k_max, rate);

  FrameDecision d;
  d.w1 = s1.weight;
  d.w2 = s2.weight;
  d.pool_after = pool;
  if (s1.weight - params.threshold() > s2.weight) {
    d.reconfigured = true;
    apply_pool_update(d.pool_after, params.pool_update, s1.users, frame);
    d.scheduled = s1.users;
    d.k_star = s1.k;
    d.cost_charged = params.cost;
  } else {
    d.scheduled = s2.users;
    d.k_star = s2.k;
  }
  d.degenerate = d.scheduled.empty();
  return d;
}

FrameDecision mjssa_frame_decision(std::span<const double> q,
                                   const SrsPool& pool,
                                   const SchedulerParams& params,
                                   const RateFn& rate, std::int64_t frame) {
  check_params(params);
  const CandidateSelection s1 =
      best_over_k(q, all_users(q.size()), params.k_max, rate);
  const CandidateSelection s2 =
      best_over_k(q, pool.members(), params.k_max, rate);

  FrameDecision d;
  d.w1 = s1.weight;
  d.w2 = s2.weight;
  d.reconfigured = true;
  d.pool_after = pool;
  apply_pool_update(d.pool_after, params.pool_update, s1.users, frame);
  d.scheduled = s1.users;
  d.k_star = s1.k;
  d.degenerate = d.scheduled.empty();
  return d;
}

FrameDecision static_frame_decision(std::span<const double> q,
                                    const SrsPool& pool,
                                    const SchedulerParams& params,
                                    const RateFn& rate) {
  const CandidateSelection s2 =
      best_over_k(q, pool.members(), params.k_max, rate);
  FrameDecision d;
  d.w2 = s2.weight;
  d.w1 = s2.weight;
  d.pool_after = pool;
  d.scheduled = s2.users;
  d.k_star = s2.k;
  d.degenerate = d.scheduled.empty();
  return d;
}

FrameDecision random_frame_decision(const SrsPool& pool,
                                    const SchedulerParams& params,
                                    std::mt19937_64& rng) {
  const std::vector<UserId> members = pool.members();
  const auto k = std::min<std::size_t>(params.k_max, members.size());
  FrameDecision d;
  d.pool_after = pool;
  std::sample(members.begin(), members.end(), std::back_inserter(d.scheduled),
              k, rng);
  d.k_star = static_cast<int>(d.scheduled.size());
  d.degenerate = d.scheduled.empty();
  return d;
}

FrameDecision decide(PolicyKind policy, std::span<const double> q,
                     const SrsPool& pool, const SchedulerParams& params,
                     const RateFn& rate, std::int64_t frame,
                     std::mt19937_64& rng) {
  switch (policy) {
    case PolicyKind::Jssa:
      return jssa_frame_decision(q, pool, params, rate, frame);
    case PolicyKind::MJssa:
      return mjssa_frame_decision(q, pool, params, rate, frame);
    case PolicyKind::Static:
      return static_frame_decision(q, pool, params, rate);
    case PolicyKind::Random:
      return random_frame_decision(pool, params, rng);
  }
  throw std::logic_error("decide: unhandled policy");
}

}  // namespace jssa::scheduler
