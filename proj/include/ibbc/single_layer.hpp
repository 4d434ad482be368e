#pragma once

// Best single-layer (outage) coding for the three relaying settings.

#include "ibbc/fading.hpp"

namespace ibbc {

struct SingleLayerSolution {
  /// Decoding threshold. A fading gain for the fixed-C schemes, an
  /// equivalent gain for the uncertain-capacity scheme.
  double s_th = 0.0;
  double allocated_rate = 0.0;
  double success_probability = 0.0;
  double average_rate = 0.0;
};

/// Smallest s with ccdf(s) < 1e-12 (capped at the support end). Beyond it
/// every outage objective is numerically zero.
double threshold_search_limit(const GainDistribution& fading);

/// max over s_th of (1 - F(s_th)) * 1/2 ln(1 + P fpr_eq(s_th)).
SingleLayerSolution oblivious_single_layer(const ChannelConfig& cfg, const GainDistribution& fading);

/// max over s_th of (1 - F(s_th)) * min(C, 1/2 ln(1 + P s_th)), smallest maximizer.
SingleLayerSolution df_single_layer(const ChannelConfig& cfg, const GainDistribution& fading);

/// Objective of the uncertain-capacity single layer at equivalent threshold
/// nu: sum_i p_i (1 - F(nu / (1 - e^{-2C_i}(1 + P nu)))) * 1/2 ln(1 + P nu),
/// where a component whose denominator is not positive contributes nothing.
double uncertain_single_layer_objective(double nu, double power, const CapacityDistribution& caps,
                                        const GainDistribution& fading);

SingleLayerSolution uncertain_single_layer(double power, const CapacityDistribution& caps,
                                           const GainDistribution& fading);

}  // namespace ibbc
