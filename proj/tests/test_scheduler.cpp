#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "jssa/errors.hpp"
#include "jssa/scheduler.hpp"

using namespace jssa::scheduler;

namespace {

// R_n(k) = g_n * log2(1 + s_n / k): decreasing in k like the hardening rate.
struct ToyRates {
  std::vector<double> g, s;
  double operator()(UserId u, int k) const { return g[u] * std::log2(1.0 + s[u] / k); }
};

ToyRates random_rates(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> g(1e3, 5e4), s(1.0, 1e4);
  ToyRates r;
  for (std::size_t i = 0; i < n; ++i) {
    r.g.push_back(g(rng));
    r.s.push_back(s(rng));
  }
  return r;
}

RateFn flat(double value) {
  return [value](UserId, int) { return value; };
}

SchedulerParams params(double v, double cost, int t, int k, std::size_t pilots) {
  SchedulerParams p;
  p.v = v;
  p.cost = cost;
  p.t_frame = t;
  p.k_max = k;
  p.pilots = pilots;
  return p;
}

}  // namespace

TEST_CASE("best_set_for_k examples") {
  const std::vector<double> q{2, 1};
  const auto s = best_set_for_k(q, all_users(2), 1, flat(1.0));
  CHECK(s.users == std::vector<UserId>{0});
  CHECK(s.weight == 2.0);

  const std::vector<double> zeros(6, 0.0);
  const auto z = best_set_for_k(zeros, all_users(6), 3, flat(5.0));
  CHECK(z.users == std::vector<UserId>{0, 1, 2});
  CHECK(z.weight == 0.0);

  const auto empty = best_set_for_k(q, {}, 2, flat(1.0));
  CHECK(empty.users.empty());
  CHECK(empty.weight == 0.0);
}

TEST_CASE("best_set_for_k matches brute force over all 3-subsets of 10") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> qd(0.0, 1e7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(10);
    for (double& x : q) x = qd(rng);
    const ToyRates r = random_rates(10, rng);
    const RateFn rate = r;
    double best = -1.0;
    std::vector<UserId> best_set;
    for (int a = 0; a < 10; ++a)
      for (int b = a + 1; b < 10; ++b)
        for (int c = b + 1; c < 10; ++c) {
          const double w = q[a] * rate(a, 3) + q[b] * rate(b, 3) + q[c] * rate(c, 3);
          if (w > best) {
            best = w;
            best_set = {a, b, c};
          }
        }
    const auto s = best_set_for_k(q, all_users(10), 3, rate);
    CHECK(s.users == best_set);
    CHECK(s.weight == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("best_over_k agrees exactly with the exhaustive oracle") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> qd(0.0, 1e7);
  std::uniform_int_distribution<int> pool_size(1, 12);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> q(12);
    for (double& x : q) x = qd(rng);
    if (trial % 10 == 0) std::fill(q.begin(), q.end(), 0.0);
    const RateFn rate = random_rates(12, rng);
    std::vector<UserId> pool = all_users(12);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(pool_size(rng));
    std::sort(pool.begin(), pool.end());
    const auto fast = best_over_k(q, pool, 4, rate);
    const auto slow = exhaustive_oracle(q, pool, 4, rate);
    CHECK(fast.users == slow.users);
    CHECK(fast.k == slow.k);
    CHECK(fast.weight == slow.weight);
  }
}

TEST_CASE("best_over_k on a single user") {
  const std::vector<double> q{0, 0, 5};
  const std::vector<UserId> pool{2};
  const auto s = best_over_k(q, pool, 6, flat(3.0));
  CHECK(s.k == 1);
  CHECK(s.users == std::vector<UserId>{2});
  CHECK(exhaustive_oracle(q, pool, 6, flat(3.0)).users == std::vector<UserId>{2});
}

TEST_CASE("exhaustive oracle guards its size") {
  const std::vector<double> q(17, 1.0);
  CHECK_THROWS_AS(exhaustive_oracle(q, all_users(17), 3, flat(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(exhaustive_oracle(q, all_users(10), 7, flat(1.0)), std::invalid_argument);
}

TEST_CASE("selection is invariant to scaling the queues") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> qd(0.0, 1e6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q(20), q8(20);
    for (int i = 0; i < 20; ++i) {
      q[i] = qd(rng);
      q8[i] = 8.0 * q[i];
    }
    const RateFn rate = random_rates(20, rng);
    const auto a = best_over_k(q, all_users(20), 5, rate);
    const auto b = best_over_k(q8, all_users(20), 5, rate);
    CHECK(a.users == b.users);
    CHECK(b.weight == 8.0 * a.weight);
  }
}

TEST_CASE("reconfiguration rule examples") {
  // W1 = 10 from user 0 outside the pool, W2 = 9 from user 1; C V / T = 2.
  const std::vector<double> q{10, 9};
  const SrsPool pool(1, std::vector<UserId>{1});
  const auto d = jssa_frame_decision(q, pool, params(40, 1, 20, 1, 1), flat(1.0), 0);
  CHECK(d.w1 == 10);
  CHECK(d.w2 == 9);
  CHECK_FALSE(d.reconfigured);
  CHECK(d.scheduled == std::vector<UserId>{1});
  CHECK(d.cost_charged == 0.0);
  CHECK(d.pool_after == pool);

  // A lower threshold flips the decision.
  const auto e = jssa_frame_decision(q, pool, params(10, 1, 20, 1, 1), flat(1.0), 3);
  CHECK(e.reconfigured);
  CHECK(e.scheduled == std::vector<UserId>{0});
  CHECK(e.cost_charged == 1.0);
  CHECK(e.pool_after.contains(0));
}

TEST_CASE("idle network never reconfigures") {
  const std::vector<double> q(30, 0.0);
  const SrsPool pool(5, std::vector<UserId>{3, 7, 9, 11, 20});
  const auto d = jssa_frame_decision(q, pool, params(200, 1, 20, 4, 5), flat(1e4), 0);
  CHECK(d.w1 == 0.0);
  CHECK(d.w2 == 0.0);
  CHECK_FALSE(d.reconfigured);
}

TEST_CASE("with zero cost JSSA behaves like M-JSSA when an outside user is better") {
  std::vector<double> q(10, 1.0);
  q[8] = 100.0;
  const SrsPool pool(4, std::vector<UserId>{0, 1, 2, 3});
  const auto p = params(200, 0, 20, 2, 4);
  const auto a = jssa_frame_decision(q, pool, p, flat(1.0), 0);
  const auto b = mjssa_frame_decision(q, pool, p, flat(1.0), 0);
  CHECK(a.reconfigured);
  CHECK(a.scheduled == b.scheduled);
  CHECK(b.cost_charged == 0.0);
}

TEST_CASE("M-JSSA always adopts the global best set at no charge") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> qd(0.0, 1e5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> q(15);
    for (double& x : q) x = qd(rng);
    const RateFn rate = random_rates(15, rng);
    const SrsPool pool(6, std::vector<UserId>{0, 2, 4, 6, 8, 10});
    const auto d = mjssa_frame_decision(q, pool, params(2000, 1, 20, 3, 6), rate, 1);
    CHECK(d.reconfigured);
    CHECK(d.cost_charged == 0.0);
    CHECK(d.scheduled == best_over_k(q, all_users(15), 3, rate).users);
  }
}

TEST_CASE("decision properties on random states") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> qd(0.0, 1e5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(25);
    for (double& x : q) x = qd(rng);
    const RateFn rate = random_rates(25, rng);
    std::vector<UserId> members = all_users(25);
    std::shuffle(members.begin(), members.end(), rng);
    members.resize(8);
    const SrsPool pool(8, members);
    const auto d = jssa_frame_decision(q, pool, params(500, 1, 20, 4, 8), rate, trial);
    // The pool's best can never beat the unrestricted best.
    CHECK(d.w2 <= d.w1);
    if (!d.reconfigured) {
      for (UserId u : d.scheduled) CHECK(pool.contains(u));
    }
    CHECK(d.pool_after.size() <= 8);
    for (UserId u : d.scheduled) CHECK(d.pool_after.contains(u));
    CHECK(std::is_sorted(d.scheduled.begin(), d.scheduled.end()));

    // Raising V can only suppress a reconfiguration.
    bool prev = true;
    for (double v : {2.0, 20.0, 200.0, 2000.0, 2e4, 2e5, 2e6}) {
      const bool r = jssa_frame_decision(q, pool, params(v, 1, 20, 4, 8), rate, 0).reconfigured;
      CHECK((prev || !r));
      prev = r;
    }
  }
}

TEST_CASE("parameter checks") {
  const std::vector<double> q{1.0};
  const SrsPool pool(1, std::vector<UserId>{0});
  CHECK_THROWS_AS(jssa_frame_decision(q, pool, params(0.5, 1, 20, 1, 1), flat(1), 0),
                  jssa::ConfigError);
  CHECK_THROWS_AS(jssa_frame_decision(q, pool, params(10, -1, 20, 1, 1), flat(1), 0),
                  jssa::ConfigError);
}

TEST_CASE("static and random baselines stay inside the pool and never pay") {
  std::mt19937_64 rng(16);
  std::vector<double> q(20, 0.0);
  q[19] = 1e6;
  const SrsPool pool(5, std::vector<UserId>{1, 2, 3, 4, 5});
  const auto p = params(200, 1, 20, 3, 5);
  const auto s = static_frame_decision(q, pool, p, flat(1.0));
  CHECK_FALSE(s.reconfigured);
  CHECK(s.cost_charged == 0.0);
  CHECK(s.pool_after == pool);
  for (int i = 0; i < 100; ++i) {
    const auto r = random_frame_decision(pool, p, rng);
    CHECK(r.scheduled.size() == 3);
    CHECK(r.cost_charged == 0.0);
    CHECK(std::is_sorted(r.scheduled.begin(), r.scheduled.end()));
    for (UserId u : r.scheduled) CHECK(pool.contains(u));
  }
}

TEST_CASE("pool updates") {
  SUBCASE("LRU evicts the oldest, lowest id first") {
    SrsPool pool(3, std::vector<UserId>{0, 1, 2});
    pool.assign_lru(std::vector<UserId>{5}, 0);
    CHECK(pool.members() == std::vector<UserId>{1, 2, 5});
    pool.assign_lru(std::vector<UserId>{2, 7}, 1);
    CHECK(pool.members() == std::vector<UserId>{2, 5, 7});
    CHECK(pool.last_assigned(2) == 1);
    CHECK(pool.last_assigned(5) == 0);
  }
  SUBCASE("replace-all") {
    SrsPool pool(3, std::vector<UserId>{0, 1, 2});
    pool.replace_all(std::vector<UserId>{9}, 4);
    CHECK(pool.members() == std::vector<UserId>{9});
  }
  SUBCASE("schedule is constant within a frame") {
    const std::vector<double> q{5, 4, 3};
    const SrsPool pool(2, std::vector<UserId>{0, 1});
    const auto d = jssa_frame_decision(q, pool, params(200, 1, 20, 2, 2), flat(1.0), 0);
    for (int slot = 0; slot < 20; ++slot) CHECK(schedule_slot(d) == d.scheduled);
  }
}

TEST_CASE("policy and pool-mode names") {
  CHECK(parse_policy("jssa") == PolicyKind::Jssa);
  CHECK(parse_policy("mjssa") == PolicyKind::MJssa);
  CHECK(parse_pool_update("replace-all") == PoolUpdate::ReplaceAll);
  CHECK(to_string(PoolUpdate::ReplaceLru) == "replace-lru");
  CHECK_THROWS_AS(parse_policy("greedy"), jssa::ConfigError);
  CHECK_THROWS_AS(parse_pool_update("append"), jssa::ConfigError);
}
