#include "ibbc/pointwise.hpp"

#include <algorithm>
#include <cmath>

namespace ibbc {

double oblivious_capacity(const ChannelPoint& pt) {
  const double snr = pt.cfg.power * pt.gain;
  return 0.5 * std::log1p(snr) - 0.5 * std::log1p(snr * std::exp(-2.0 * pt.cfg.capacity));
}

QuantizationModel quantization_noise_variance(const ChannelPoint& pt) {
  if (!(pt.cfg.capacity > 0.0)) {
    throw std::domain_error("quantization_noise_variance: C = 0 means infinite quantization noise");
  }
  return {(pt.cfg.power * pt.gain + 1.0) / std::expm1(2.0 * pt.cfg.capacity)};
}

double df_capacity(const ChannelPoint& pt) {
  return std::min(0.5 * std::log1p(pt.cfg.power * pt.gain), pt.cfg.capacity);
}

double ergodic_oblivious(const ChannelConfig& cfg, const GainDistribution& fading) {
  cfg.validate();
  if (cfg.capacity == 0.0) return 0.0;
  // The integrand bends at s ~ 1/P (log onset) and again at s ~ e^{2C}/P
  // (compression saturation).
  const std::vector<double> kinks{1.0 / cfg.power, std::exp(2.0 * cfg.capacity) / cfg.power};
  return fading.expect([&](double s) { return oblivious_capacity({cfg, s}); }, kinks);
}

double ergodic_df(const ChannelConfig& cfg, const GainDistribution& fading) {
  cfg.validate();
  if (cfg.capacity == 0.0) return 0.0;
  const double s_switch = std::expm1(2.0 * cfg.capacity) / cfg.power;
  return fading.expect([&](double s) { return df_capacity({cfg, s}); }, {1.0 / cfg.power, s_switch});
}

double ergodic_oblivious_uncertain(double power, const CapacityDistribution& caps,
                                   const GainDistribution& fading) {
  double sum = 0.0;
  for (const auto& atom : caps.atoms()) {
    sum += atom.probability * ergodic_oblivious({power, atom.capacity}, fading);
  }
  return sum;
}

}  // namespace ibbc
