#include "ibbc/single_layer.hpp"

#include <algorithm>
#include <cmath>

#include "ibbc/pointwise.hpp"

namespace ibbc {

namespace {

constexpr double kTailMass = 1e-12;

const numerics::Tolerance kMaxTol{.rel = 1e-12, .abs = 1e-15, .max_iter = 200};

}  // namespace

double threshold_search_limit(const GainDistribution& fading) {
  const double upper = fading.support_upper();
  if (std::isfinite(upper)) return upper;
  double hi = 1.0;
  while (fading.ccdf(hi) >= kTailMass) hi *= 2.0;
  return numerics::find_root([&](double s) { return fading.ccdf(s) - kTailMass; }, 0.5 * hi, hi);
}

SingleLayerSolution oblivious_single_layer(const ChannelConfig& cfg, const GainDistribution& fading) {
  cfg.validate();
  if (cfg.capacity == 0.0) return {};
  const auto rate = [&](double s) { return 0.5 * std::log1p(cfg.power * fpr_eq(s, cfg)); };
  const auto best = numerics::maximize_scalar([&](double s) { return fading.ccdf(s) * rate(s); }, 0.0,
                                              threshold_search_limit(fading), kMaxTol);
  SingleLayerSolution out;
  out.s_th = best.arg;
  out.allocated_rate = rate(best.arg);
  out.success_probability = fading.ccdf(best.arg);
  out.average_rate = out.success_probability * out.allocated_rate;
  return out;
}

SingleLayerSolution df_single_layer(const ChannelConfig& cfg, const GainDistribution& fading) {
  cfg.validate();
  if (cfg.capacity == 0.0) return {};
  // Above s* = (e^{2C}-1)/P the objective is (1-F(s)) C, which only falls.
  const double s_switch = std::expm1(2.0 * cfg.capacity) / cfg.power;
  const double hi = std::min(s_switch, threshold_search_limit(fading));
  const auto rate = [&](double s) { return df_capacity({cfg, s}); };
  const auto best =
      numerics::maximize_scalar([&](double s) { return fading.ccdf(s) * rate(s); }, 0.0, hi, kMaxTol);
  SingleLayerSolution out;
  out.s_th = best.arg;
  out.allocated_rate = rate(best.arg);
  out.success_probability = fading.ccdf(best.arg);
  out.average_rate = out.success_probability * out.allocated_rate;
  return out;
}

double uncertain_single_layer_objective(double nu, double power, const CapacityDistribution& caps,
                                        const GainDistribution& fading) {
  double success = 0.0;
  for (const auto& atom : caps.atoms()) {
    const double denom = 1.0 - std::exp(-2.0 * atom.capacity) * (1.0 + power * nu);
    if (denom > 0.0) success += atom.probability * fading.ccdf(nu / denom);
  }
  return success * 0.5 * std::log1p(power * nu);
}

SingleLayerSolution uncertain_single_layer(double power, const CapacityDistribution& caps,
                                           const GainDistribution& fading) {
  if (!(power > 0.0)) throw std::invalid_argument("uncertain_single_layer: power must be > 0");
  if (caps.max_capacity() == 0.0) return {};
  const double hi =
      std::min(threshold_search_limit(fading), fpr_eq_limit({power, caps.max_capacity()}));
  const auto best = numerics::maximize_scalar(
      [&](double nu) { return uncertain_single_layer_objective(nu, power, caps, fading); }, 0.0, hi,
      kMaxTol);
  SingleLayerSolution out;
  out.s_th = best.arg;
  out.allocated_rate = 0.5 * std::log1p(power * best.arg);
  out.average_rate = best.value;
  out.success_probability = out.allocated_rate > 0.0 ? best.value / out.allocated_rate : 0.0;
  return out;
}

}  // namespace ibbc
