#pragma once

// Continuous broadcast-approach layering over a block-fading gain.
//
// A layering is described by the residual interference I(u): the power of
// all layers indexed above gain u. A receiver with gain s decodes every layer
// up to s, collecting
//
//   R(s) = 1/2 * integral_0^s rho(u) u / (1 + I(u) u) du,   rho = -I'.
//
// On the active span [u0, u1] the optimum follows the pointwise stationary
// profile
//
//   I*(u) = (1 - G(u) - lambda - u g(u)) / (u^2 g(u)),
//
// with I = P below u0 and I = 0 above u1. lambda is zero unless a total-rate
// cap binds (decode-forward relaying over a bottleneck of capacity C). Along
// the stationary profile R telescopes to 1/2 ln(s^2 g(s) / (u0^2 g(u0))),
// independent of lambda.
//
// When I* is not monotone (it happens for capacity mixtures at high SNR), the
// optimum over non-increasing profiles holds I at a constant level c on each
// violating interval [a, b], where I*(a) = I*(b) = c. R is flat there.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibbc/fading.hpp"
#include "ibbc/single_layer.hpp"

namespace ibbc {

class BroadcastError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A boundary equation I(u0) = P or I(u1) = 0 has no sign change.
class BoundaryError : public BroadcastError {
 public:
  BoundaryError(const std::string& boundary, const std::string& detail);
  std::string boundary;
};

/// I*(u) increases somewhere inside [u0, u1].
class NonMonotoneError : public BroadcastError {
 public:
  NonMonotoneError(double where, const std::string& detail);
  double where;
};

/// The rate-constrained system has no bracketed solution.
class ConstraintError : public BroadcastError {
 public:
  ConstraintError(double unconstrained_total, double capacity, const std::string& detail);
  double unconstrained_total;
  double capacity;
};

struct IronedInterval {
  double lo;
  double hi;
  double level;
};

struct BroadcastSolution {
  GainPtr gain;  // law the layering was optimized for
  double power = 0.0;
  double u0 = 0.0;
  double u1 = 0.0;
  double lambda = 0.0;
  std::vector<IronedInterval> ironed;
  double total_rate = 0.0;
  double average_rate = 0.0;

  /// Stationary profile I*(u) before clamping to [0, P] or ironing.
  double stationary_power(double u) const;
  double residual_power(double u) const;
  /// rho(u) = -I'(u); zero outside [u0, u1] and on ironed intervals.
  double power_density(double u) const;
  /// Incremental rate dR/du = 1/2 rho(u) u / (1 + I(u) u).
  double rate_density(double u) const;
  double rate_allocation(double s) const;
};

/// Optimal layering for gain law G without a rate cap. Throws NonMonotoneError
/// if I* is not non-increasing on [u0, u1].
BroadcastSolution solve_unconstrained(GainPtr gain, double power);

/// As solve_unconstrained, but non-monotone stationary profiles are ironed.
BroadcastSolution solve_unconstrained_ironed(GainPtr gain, double power);

/// Decode-forward layering whose total rate R(u1) may not exceed C.
BroadcastSolution solve_df_constrained(GainPtr fading, const ChannelConfig& cfg);

/// solve_df_constrained, or the DF single-layer solution tagged as a fallback
/// when the continuum solver fails.
struct DfBroadcastResult {
  std::optional<BroadcastSolution> broadcast;
  SingleLayerSolution fallback;
  std::string fallback_reason;

  bool is_fallback() const { return !broadcast.has_value(); }
  double average_rate() const { return broadcast ? broadcast->average_rate : fallback.average_rate; }
};

DfBroadcastResult solve_df_broadcast(GainPtr fading, const ChannelConfig& cfg);

double residual_power(const BroadcastSolution& sol, double u);
double rate_allocation(const BroadcastSolution& sol, double s);

/// integral of (1 - G(u)) dR(u) over [u0, u1].
double average_rate(const BroadcastSolution& sol, const GainDistribution& g);

/// The same average integrated by parts: integral of R(u) dG(u), including
/// the mass of G beyond u1.
double average_rate_by_parts(const BroadcastSolution& sol, const GainDistribution& g);

}  // namespace ibbc
