#include "jssa/queueing.hpp"

#include <algorithm>
#include <stdexcept>

namespace jssa::queueing {

QueueUpdate update_queue(double q, bool scheduled, double rate,
                         double arrivals) {
  if (q < 0.0 || rate < 0.0 || arrivals < 0.0) {
    throw std::invalid_argument("update_queue: negative input");
  }
  const double service = scheduled ? rate : 0.0;
  QueueUpdate u;
  u.served = std::min(q, service);
  u.new_q = std::max(q - service, 0.0) + arrivals;
  return u;
}

QueueState::QueueState(std::size_t users, double initial_bits)
    : q_(users, initial_bits), initial_total_(initial_bits * users) {
  if (initial_bits < 0.0) {
    throw std::invalid_argument("QueueState: negative initial backlog");
  }
}

void QueueState::step(std::span<const double> offered,
                      std::span<const double> arrivals,
                      std::span<double> served) {
  if (offered.size() != q_.size() || arrivals.size() != q_.size() ||
      served.size() != q_.size()) {
    throw std::invalid_argument("QueueState::step: size mismatch");
  }
  for (std::size_t n = 0; n < q_.size(); ++n) {
    const QueueUpdate u =
        update_queue(q_[n], offered[n] > 0.0, offered[n], arrivals[n]);
    q_[n] = u.new_q;
    served[n] = u.served;
    served_ += u.served;
    arrived_ += arrivals[n];
  }
}

double total_backlog(std::span<const double> q) {
  double total = 0.0;
  for (double v : q) total += v;
  return total;
}

}  // namespace jssa::queueing
