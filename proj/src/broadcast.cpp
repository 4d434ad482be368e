#include "ibbc/broadcast.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "layering.hpp"

namespace ibbc {

BoundaryError::BoundaryError(const std::string& boundary_, const std::string& detail)
    : BroadcastError("broadcast boundary " + boundary_ + ": " + detail), boundary(boundary_) {}

NonMonotoneError::NonMonotoneError(double where_, const std::string& detail)
    : BroadcastError(detail), where(where_) {}

ConstraintError::ConstraintError(double unconstrained_total_, double capacity_, const std::string& detail)
    : BroadcastError(detail), unconstrained_total(unconstrained_total_), capacity(capacity_) {}

namespace detail {

double Profile::operator()(double u) const {
  const double survival = gain.ccdf(u) - lambda;
  const double density = gain.pdf(u);
  if (density > 0.0) return survival / (density * u * u) - 1.0 / u;
  return survival > 0.0 ? numerics::kInf : -1.0 / u;
}

double Profile::marginal(double u, double c) const {
  const double x = 1.0 + c * u;
  return (gain.ccdf(u) - lambda) / (x * x) - gain.pdf(u) * u / x;
}

double log_potential(const GainDistribution& gain, double u) { return std::log(u) + 0.5 * std::log(gain.pdf(u)); }

}  // namespace detail

namespace {

using detail::Profile;
using detail::ProfileSamples;

constexpr int kScanPoints = 2048;
constexpr int kCheckPoints = 1024;
constexpr double kTailMass = 1e-13;
const numerics::Tolerance kRootTol{.rel = 1e-15, .abs = 1e-300, .max_iter = 400};
const numerics::Tolerance kQuadTol{.rel = 1e-11, .abs = 1e-14, .max_iter = 500};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double span = std::log(hi) - a;
  for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = std::exp(a + span * k / (n - 1));
  x.front() = lo;
  x.back() = hi;
  return x;
}

/// Sampled I* over a window [lo, hi] with I*(lo) > P and I*(hi) <= 0. The
/// window reaches into the tail because I* may dip below zero and recover.
ProfileSamples scan_profile(const Profile& profile, double power) {
  const double upper = profile.gain.support_upper();
  double hi = 1.0;
  for (int i = 0; hi < upper && profile.gain.ccdf(hi) > kTailMass; ++i) {
    if (i > 1000) throw BoundaryError("u1", "gain law has no negligible tail");
    hi *= 2.0;
  }
  hi = std::min(hi, upper);
  if (profile(hi) > 0.0) throw BoundaryError("u1", "I(u) > 0 at the end of the scan window " + fmt(hi));

  double lo = 0.5 * hi;
  for (int i = 0; !(profile(lo) > power); ++i) {
    if (i > 1000) throw BoundaryError("u0", "I(u) never exceeds P = " + fmt(power) + " near zero");
    lo *= 0.5;
  }

  ProfileSamples s;
  s.x = log_grid(lo, hi, kScanPoints);
  s.value.reserve(s.x.size());
  for (double x : s.x) s.value.push_back(profile(x));
  return s;
}

struct Span {
  double u0;
  double u1;
  std::size_t k0;  // first sample with I* <= P
  std::size_t k1;  // first sample after the last positive one
};

Span locate_span(const Profile& profile, double power, const ProfileSamples& s) {
  const auto& v = s.value;
  std::size_t k0 = 0;
  while (k0 < v.size() && v[k0] > power) ++k0;
  if (k0 == 0 || k0 == v.size()) throw BoundaryError("u0", "no sign change of I(u) - P on the scan window");
  std::size_t k1 = v.size();
  while (k1 > k0 && !(v[k1 - 1] > 0.0)) --k1;
  if (k1 == k0) throw BoundaryError("u1", "I(u) is not positive right after u0");
  if (k1 == v.size()) throw BoundaryError("u1", "no sign change of I(u) on the scan window");

  Span out{};
  out.k0 = k0;
  out.k1 = k1;
  out.u0 = numerics::find_root([&](double u) { return profile(u) - power; }, s.x[k0 - 1], s.x[k0], kRootTol);
  const double lo1 = std::max(s.x[k1 - 1], out.u0);
  out.u1 = numerics::find_root([&](double u) { return profile(u); }, lo1, s.x[k1], kRootTol);
  return out;
}

/// First sample index inside the span where the profile rises beyond tolerance.
std::optional<std::size_t> first_rise(const ProfileSamples& s, const Span& span, double power) {
  const double tol = 1e-9 * std::max(1.0, power);
  for (std::size_t k = span.k0; k < span.k1; ++k) {
    if (s.value[k] > s.value[k - 1] + tol) return k;
  }
  return std::nullopt;
}

BroadcastSolution assemble(GainPtr gain, double power, double lambda, double u0, double u1,
                           std::vector<IronedInterval> ironed) {
  BroadcastSolution sol;
  sol.gain = std::move(gain);
  sol.power = power;
  sol.lambda = lambda;
  sol.u0 = u0;
  sol.u1 = u1;
  sol.ironed = std::move(ironed);
  if (!(u0 > 0.0 && u0 < u1)) {
    throw BoundaryError("u0", "degenerate span u0=" + fmt(u0) + ", u1=" + fmt(u1));
  }

  const auto grid = log_grid(u0, u1, kCheckPoints);
  const double tol = 1e-9 * power;
  double prev = sol.residual_power(grid.front());
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double cur = sol.residual_power(grid[k]);
    if (cur > prev + tol) {
      throw NonMonotoneError(grid[k], "residual power increases near u=" + fmt(grid[k]) +
                                          "; distribution outside the solver's validity class");
    }
    prev = cur;
  }

  sol.total_rate = sol.rate_allocation(u1);
  sol.average_rate = average_rate(sol, *sol.gain);
  return sol;
}

BroadcastSolution solve_stationary(GainPtr gain, double power, bool allow_ironing) {
  if (!gain) throw std::invalid_argument("solve_unconstrained: null distribution");
  if (!(power > 0.0) || !std::isfinite(power)) throw std::invalid_argument("solve_unconstrained: power must be > 0");
  const Profile profile{*gain, 0.0};
  const auto samples = scan_profile(profile, power);
  const auto span = locate_span(profile, power, samples);

  std::vector<IronedInterval> ironed;
  if (const auto rise = first_rise(samples, span, power)) {
    if (!allow_ironing) {
      throw NonMonotoneError(samples.x[*rise], "I(u) increases near u=" + fmt(samples.x[*rise]) +
                                                   "; distribution outside the solver's validity class");
    }
    ironed = detail::iron(profile, power, samples, span.u0, span.u1);
  }
  return assemble(std::move(gain), power, 0.0, span.u0, span.u1, std::move(ironed));
}

}  // namespace

// ---------------------------------------------------------------------------

double BroadcastSolution::stationary_power(double u) const { return Profile{*gain, lambda}(u); }

double BroadcastSolution::residual_power(double u) const {
  if (u < u0) return power;
  if (u > u1) return 0.0;
  for (const auto& iv : ironed) {
    if (u >= iv.lo && u <= iv.hi) return iv.level;
  }
  if (u == u0) return power;
  if (u == u1) return 0.0;
  return stationary_power(u);
}

double BroadcastSolution::power_density(double u) const {
  if (u < u0 || u > u1) return 0.0;
  for (const auto& iv : ironed) {
    if (u > iv.lo && u < iv.hi) return 0.0;
  }
  const double h = 1e-4 * u;
  const double d = (-stationary_power(u + 2 * h) + 8 * stationary_power(u + h) - 8 * stationary_power(u - h) +
                    stationary_power(u - 2 * h)) /
                   (12 * h);
  return -d;
}

double BroadcastSolution::rate_density(double u) const {
  const double rho = power_density(u);
  if (rho == 0.0) return 0.0;
  return 0.5 * rho * u / (1.0 + residual_power(u) * u);
}

double BroadcastSolution::rate_allocation(double s) const {
  if (s <= u0) return 0.0;
  const double x = std::min(s, u1);
  double r = detail::log_potential(*gain, x) - detail::log_potential(*gain, u0);
  for (const auto& iv : ironed) {
    if (x <= iv.lo) break;
    const double end = std::min(x, iv.hi);
    r -= detail::log_potential(*gain, end) - detail::log_potential(*gain, iv.lo);
  }
  return std::max(r, 0.0);
}

double residual_power(const BroadcastSolution& sol, double u) { return sol.residual_power(u); }

double rate_allocation(const BroadcastSolution& sol, double s) { return sol.rate_allocation(s); }

namespace {

/// [u0, u1] minus the ironed intervals.
std::vector<std::pair<double, double>> active_pieces(const BroadcastSolution& sol) {
  std::vector<std::pair<double, double>> pieces;
  double start = sol.u0;
  for (const auto& iv : sol.ironed) {
    pieces.emplace_back(start, iv.lo);
    start = iv.hi;
  }
  pieces.emplace_back(start, sol.u1);
  return pieces;
}

}  // namespace

double average_rate(const BroadcastSolution& sol, const GainDistribution& g) {
  double sum = 0.0;
  for (const auto& [a, b] : active_pieces(sol)) {
    if (!(a < b)) continue;
    sum += numerics::integrate([&](double u) { return g.ccdf(u) * sol.rate_density(u); }, a, b, kQuadTol)
               .checked("broadcast average rate");
  }
  return sum;
}

double average_rate_by_parts(const BroadcastSolution& sol, const GainDistribution& g) {
  std::vector<double> edges;
  for (const auto& iv : sol.ironed) {
    edges.push_back(iv.lo);
    edges.push_back(iv.hi);
  }
  const double body =
      numerics::integrate([&](double u) { return sol.rate_allocation(u) * g.pdf(u); }, sol.u0, sol.u1, edges,
                          kQuadTol)
          .checked("broadcast average rate (by parts)");
  return body + sol.total_rate * g.ccdf(sol.u1);
}

BroadcastSolution solve_unconstrained(GainPtr gain, double power) {
  return solve_stationary(std::move(gain), power, false);
}

BroadcastSolution solve_unconstrained_ironed(GainPtr gain, double power) {
  return solve_stationary(std::move(gain), power, true);
}

BroadcastSolution solve_df_constrained(GainPtr fading, const ChannelConfig& cfg) {
  cfg.validate();
  if (!(cfg.capacity > 0.0)) throw std::invalid_argument("solve_df_constrained: requires C > 0");
  auto unconstrained = solve_unconstrained(fading, cfg.power);
  if (unconstrained.total_rate <= cfg.capacity) return unconstrained;

  const GainDistribution& f = *fading;
  const double power = cfg.power;
  // I_lambda(u1) = 0 fixes lambda = 1 - F(u1) - u1 f(u1) for a candidate u1.
  const auto lambda_at = [&](double u1) { return f.ccdf(u1) - u1 * f.pdf(u1); };
  const auto u0_at = [&](double u1, double lambda) {
    const Profile profile{f, lambda};
    double lo = 0.5 * u1;
    for (int i = 0; !(profile(lo) > power); ++i) {
      if (i > 1000) throw BoundaryError("u0", "I_lambda(u) never exceeds P below u1=" + fmt(u1));
      lo *= 0.5;
    }
    return numerics::find_root([&](double u) { return profile(u) - power; }, lo, u1, kRootTol);
  };
  const auto excess = [&](double u1) {
    const double u0 = u0_at(u1, lambda_at(u1));
    return detail::log_potential(f, u1) - detail::log_potential(f, u0) - cfg.capacity;
  };

  const double hi = unconstrained.u1;
  double lo = 0.5 * hi;
  for (int i = 0; excess(lo) >= 0.0; ++i) {
    if (i > 200) {
      throw ConstraintError(unconstrained.total_rate, cfg.capacity,
                            "rate-constrained layering: no bracket for total rate = C (unconstrained total " +
                                fmt(unconstrained.total_rate) + ", C = " + fmt(cfg.capacity) + ")");
    }
    lo *= 0.5;
  }
  const double u1 = numerics::find_root(excess, lo, hi, kRootTol);
  const double lambda = lambda_at(u1);
  if (!(lambda > 0.0)) {
    throw ConstraintError(unconstrained.total_rate, cfg.capacity,
                          "rate-constrained layering: multiplier " + fmt(lambda) + " is not positive");
  }
  const double u0 = u0_at(u1, lambda);
  return assemble(std::move(fading), power, lambda, u0, u1, {});
}

DfBroadcastResult solve_df_broadcast(GainPtr fading, const ChannelConfig& cfg) {
  DfBroadcastResult out;
  if (cfg.capacity == 0.0) {
    out.fallback = df_single_layer(cfg, *fading);
    out.fallback_reason = "C = 0";
    return out;
  }
  try {
    out.broadcast = solve_df_constrained(fading, cfg);
  } catch (const std::exception& e) {
    out.fallback = df_single_layer(cfg, *fading);
    out.fallback_reason = e.what();
  }
  return out;
}

}  // namespace ibbc
