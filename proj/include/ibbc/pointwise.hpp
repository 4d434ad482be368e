#pragma once

// Instantaneous capacities at a fading realization and their ergodic
// averages. All rates are in nats per real channel use (with the 1/2 factor).

#include "ibbc/fading.hpp"

namespace ibbc {

struct ChannelPoint {
  ChannelConfig cfg;
  double gain = 0.0;  // s = |h|^2
};

/// Z = Y + M with E[M^2] chosen so that I(Z;Y) = C.
struct QuantizationModel {
  double noise_variance;
};

/// Compress-forward rate 1/2 ln(1 + P s) - 1/2 ln(1 + P s e^{-2C}).
double oblivious_capacity(const ChannelPoint& pt);

/// E[M^2] = (P s + 1) / (e^{2C} - 1). Throws std::domain_error for C = 0.
QuantizationModel quantization_noise_variance(const ChannelPoint& pt);

/// Decode-forward rate min{1/2 ln(1 + P s), C}.
double df_capacity(const ChannelPoint& pt);

double ergodic_oblivious(const ChannelConfig& cfg, const GainDistribution& fading);
double ergodic_df(const ChannelConfig& cfg, const GainDistribution& fading);
/// sum_i p_i ergodic_oblivious(P, C_i).
double ergodic_oblivious_uncertain(double power, const CapacityDistribution& caps,
                                   const GainDistribution& fading);

}  // namespace ibbc
