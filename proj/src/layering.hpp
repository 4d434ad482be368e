#pragma once

// Internals shared by the broadcast solvers and the ironing step.

#include <vector>

#include "ibbc/broadcast.hpp"

namespace ibbc::detail {

/// Stationary residual-power profile I*(u) = (S(u) - lambda - u g(u)) / (u^2 g(u))
/// for survival S = 1 - G and density g.
struct Profile {
  const GainDistribution& gain;
  double lambda = 0.0;

  double operator()(double u) const;

  /// d/dI of the pointwise objective (S - lambda) I / (1 + I u) - g ln(1 + I u)
  /// at level c. Positive exactly where c < I*(u).
  double marginal(double u, double c) const;
};

/// 1/2 ln(u^2 g(u)); R(s) - R(u0) along the stationary profile is its increment.
double log_potential(const GainDistribution& gain, double u);

struct ProfileSamples {
  std::vector<double> x;
  std::vector<double> value;
};

/// Replace each region where the samples of I* increase on (u0, u1) by the
/// exact constant level that maximizes the objective over non-increasing
/// profiles. Throws NonMonotoneError if a region cannot be resolved inside
/// (0, P).
std::vector<IronedInterval> iron(const Profile& profile, double power, const ProfileSamples& samples,
                                 double u0, double u1);

}  // namespace ibbc::detail
