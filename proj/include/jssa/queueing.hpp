#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace jssa::queueing {

struct QueueUpdate {
  double new_q = 0.0;
  double served = 0.0;
};

// Q' = max(Q - I*R, 0) + A. Service is applied before arrivals; throws
// std::invalid_argument on negative inputs.
QueueUpdate update_queue(double q, bool scheduled, double rate, double arrivals);

class QueueState {
 public:
  explicit QueueState(std::size_t users, double initial_bits = 0.0);

  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t user) const { return q_[user]; }
  std::span<const double> backlog() const { return q_; }

  // Applies one slot; `offered` holds I_n R_n per user, `served` receives
  // min(Q_n, I_n R_n).
  void step(std::span<const double> offered, std::span<const double> arrivals,
            std::span<double> served);

  double cumulative_arrived() const { return arrived_; }
  double cumulative_served() const { return served_; }
  double initial_total() const { return initial_total_; }

 private:
  std::vector<double> q_;
  double arrived_ = 0.0;
  double served_ = 0.0;
  double initial_total_ = 0.0;
};

double total_backlog(std::span<const double> q);
inline double total_backlog(const QueueState& s) {
  return total_backlog(s.backlog());
}

}  // namespace jssa::queueing
