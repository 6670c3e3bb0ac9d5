#pragma once

// Large-scale fading, channel-hardening rates and MMSE-precoded link rates for
// a single-cell Massive MIMO downlink.

#include <complex>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace jssa::phy {

using Complex = std::complex<double>;
using ChannelMatrix = Eigen::MatrixXcd;  // antennas x scheduled users
using PrecoderMatrix = Eigen::MatrixXcd;

struct Point {
  double x_m = 0.0;
  double y_m = 0.0;
};

struct PathLossModel {
  double loss_at_1km_db = -148.1;
  double exponent = 3.76;
  double min_distance_m = 10.0;
  double shadow_sigma_db = 10.0;
};

struct LargeScaleGain {
  double beta = 0.0;  // linear power gain
  double distance_m = 0.0;
  double shadow_db = 0.0;
};

// Everything needed to turn an SINR into bits per slot.
struct LinkBudget {
  double p_tot_w = 1.0;
  double noise_w = 0.0;
  int antennas = 64;
  double bandwidth_hz = 20e6;
  double gamma = 0.8;  // data fraction of the time/frequency resource
  double slot_s = 1e-3;
  double r_max_bits = std::numeric_limits<double>::infinity();

  double bits_per_slot(double sinr) const;
};

// Thermal noise over the band: -174 dBm/Hz + 10 log10(B) + noise figure.
double noise_power_w(double bandwidth_hz, double noise_figure_db = 7.0);

double pathloss_db(double distance_m, const PathLossModel& model);

LargeScaleGain path_gain(Point user, Point bs, double shadow_db,
                         const PathLossModel& model);

// Deterministic-equivalent rate of a user in a size-k ZF-style group:
// SINR = (P_tot/k)(M - k) beta / sigma^2. Throws ConfigError when k >= M.
double hardening_rate(double beta, int k, const LinkBudget& budget);
inline double hardening_rate(const LargeScaleGain& gain, int k,
                             const LinkBudget& budget) {
  return hardening_rate(gain.beta, k, budget);
}

// i.i.d. circularly-symmetric complex Gaussian columns with variance beta_n.
ChannelMatrix draw_small_scale(int antennas, std::span<const double> betas,
                               std::mt19937_64& rng);

// Unit-norm columns of H (H^H H + alpha I)^-1, alpha = sigma^2 k / P_tot.
PrecoderMatrix mmse_precoders(const ChannelMatrix& h, double p_tot_w,
                              double noise_w);

// Per-user SINR with equal power split P_tot/k across the k columns of H.
std::vector<double> realized_sinr(const ChannelMatrix& h,
                                  const PrecoderMatrix& w,
                                  const LinkBudget& budget);

std::vector<double> realized_rates(const ChannelMatrix& h,
                                   const PrecoderMatrix& w,
                                   const LinkBudget& budget);

// R_max: the uncapped k = 1 hardening rate of a user at the minimum distance
// with zero shadowing. Every rate operation clips to it.
double max_rate_bits(const PathLossModel& model, LinkBudget budget);

}  // namespace jssa::phy
