#include "jssa/phy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jssa/errors.hpp"

namespace jssa::phy {

double LinkBudget::bits_per_slot(double sinr) const {
  if (!(sinr > 0.0)) return 0.0;
  const double rate = slot_s * bandwidth_hz * gamma * std::log2(1.0 + sinr);
  return std::min(rate, r_max_bits);
}

double noise_power_w(double bandwidth_hz, double noise_figure_db) {
  const double dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double pathloss_db(double distance_m, const PathLossModel& model) {
  const double d = std::max(distance_m, model.min_distance_m);
  return model.loss_at_1km_db - 10.0 * model.exponent * std::log10(d / 1000.0);
}

LargeScaleGain path_gain(Point user, Point bs, double shadow_db,
                         const PathLossModel& model) {
  if (!std::isfinite(user.x_m) || !std::isfinite(user.y_m) ||
      !std::isfinite(bs.x_m) || !std::isfinite(bs.y_m)) {
    throw ConfigError("position", "non-finite coordinate");
  }
  if (!std::isfinite(shadow_db)) {
    throw ConfigError("shadow_db", "non-finite shadowing");
  }
  LargeScaleGain g;
  g.distance_m = std::hypot(user.x_m - bs.x_m, user.y_m - bs.y_m);
  g.shadow_db = shadow_db;
  g.beta = std::pow(10.0, (pathloss_db(g.distance_m, model) + shadow_db) / 10.0);
  return g;
}

double hardening_rate(double beta, int k, const LinkBudget& budget) {
  if (k < 1 || k >= budget.antennas) {
    throw ConfigError("k", "group size " + std::to_string(k) +
                               " must satisfy 1 <= k < M = " +
                               std::to_string(budget.antennas));
  }
  if (!(budget.p_tot_w > 0.0) || !(budget.noise_w > 0.0)) {
    throw ConfigError("p_tot_w", "transmit and noise power must be positive");
  }
  const double sinr = (budget.p_tot_w / k) * (budget.antennas - k) *
                      std::max(beta, 0.0) / budget.noise_w;
  return budget.bits_per_slot(sinr);
}

ChannelMatrix draw_small_scale(int antennas, std::span<const double> betas,
                               std::mt19937_64& rng) {
  const auto users = static_cast<Eigen::Index>(betas.size());
  ChannelMatrix h(antennas, users);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index n = 0; n < users; ++n) {
    const double scale = std::sqrt(std::max(betas[n], 0.0) / 2.0);
    for (int m = 0; m < antennas; ++m) {
      const double re = normal(rng);
      const double im = normal(rng);
      h(m, n) = Complex(scale * re, scale * im);
    }
  }
  return h;
}

PrecoderMatrix mmse_precoders(const ChannelMatrix& h, double p_tot_w,
                              double noise_w) {
  const auto k = h.cols();
  if (k == 0) return PrecoderMatrix(h.rows(), 0);
  const double alpha = noise_w * static_cast<double>(k) / p_tot_w;
  Eigen::MatrixXcd gram = h.adjoint() * h;
  gram.diagonal().array() += alpha;
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericError("MMSE Gram matrix is not positive definite");
  }
  PrecoderMatrix w = h * llt.solve(Eigen::MatrixXcd::Identity(k, k));
  for (Eigen::Index n = 0; n < k; ++n) {
    const double norm = w.col(n).norm();
    if (!std::isfinite(norm)) {
      throw NumericError("MMSE precoder column is not finite");
    }
    // A zero channel column yields a zero precoder; leave it unnormalized.
    if (norm > 0.0) w.col(n) /= norm;
  }
  return w;
}

std::vector<double> realized_sinr(const ChannelMatrix& h,
                                  const PrecoderMatrix& w,
                                  const LinkBudget& budget) {
  const auto k = h.cols();
  if (w.cols() != k || w.rows() != h.rows()) {
    throw std::invalid_argument("channel and precoder dimensions differ");
  }
  std::vector<double> sinr(static_cast<std::size_t>(k), 0.0);
  if (k == 0) return sinr;
  const double power = budget.p_tot_w / static_cast<double>(k);
  // cross(n, j) = h_n^H w_j
  const Eigen::MatrixXcd cross = h.adjoint() * w;
  for (Eigen::Index n = 0; n < k; ++n) {
    const double signal = power * std::norm(cross(n, n));
    double interference = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j != n) interference += power * std::norm(cross(n, j));
    }
    sinr[n] = signal / (interference + budget.noise_w);
  }
  return sinr;
}

std::vector<double> realized_rates(const ChannelMatrix& h,
                                   const PrecoderMatrix& w,
                                   const LinkBudget& budget) {
  std::vector<double> rates = realized_sinr(h, w, budget);
  for (double& r : rates) r = budget.bits_per_slot(r);
  return rates;
}

double max_rate_bits(const PathLossModel& model, LinkBudget budget) {
  budget.r_max_bits = std::numeric_limits<double>::infinity();
  const double beta =
      std::pow(10.0, pathloss_db(model.min_distance_m, model) / 10.0);
  return hardening_rate(beta, 1, budget);
}

}  // namespace jssa::phy
