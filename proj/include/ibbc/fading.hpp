#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ibbc/numerics.hpp"

namespace ibbc {

/// Transmit power P (linear, E[X^2] = P) and bottleneck capacity C in nats per
/// real channel use.
struct ChannelConfig {
  double power = 1.0;
  double capacity = 0.0;

  void validate() const;
};

/// Law of a non-negative power gain. Implementations are immutable, so a
/// distribution can be shared freely between solvers and sweep workers.
class GainDistribution {
 public:
  virtual ~GainDistribution() = default;

  virtual double pdf(double u) const = 0;
  /// 1 - F(u), computed directly for tail accuracy.
  virtual double ccdf(double u) const = 0;
  /// Defined as 1 - ccdf(u), so the two agree to rounding.
  double cdf(double u) const { return 1.0 - ccdf(u); }
  /// Upper end of the support; +infinity for unbounded gains.
  virtual double support_upper() const { return numerics::kInf; }

  /// Inverse CDF for p in [0, 1). The default inverts ccdf by root finding.
  virtual double quantile(double p) const;

  /// E[h(U)], by quadrature against pdf split at `kinks`. Distributions with
  /// atoms override this.
  virtual double expect(const numerics::ScalarFn& h, std::vector<double> kinks = {},
                        const numerics::Tolerance& tol = {}) const;

  virtual std::string name() const = 0;
};

using GainPtr = std::shared_ptr<const GainDistribution>;

/// Unit-mean exponential power gain |h|^2 of Rayleigh fading.
class RayleighGain final : public GainDistribution {
 public:
  double pdf(double u) const override;
  double ccdf(double u) const override;
  double quantile(double p) const override;
  std::string name() const override { return "rayleigh"; }
};

/// Point mass at a fixed gain (non-fading channel). Has no density; pdf is 0
/// and expectations are exact.
class DeterministicGain final : public GainDistribution {
 public:
  explicit DeterministicGain(double gain);
  double pdf(double) const override { return 0.0; }
  double ccdf(double u) const override { return u < gain_ ? 1.0 : 0.0; }
  double quantile(double) const override { return gain_; }
  double expect(const numerics::ScalarFn& h, std::vector<double> kinks = {},
                const numerics::Tolerance& tol = {}) const override;
  std::string name() const override { return "deterministic"; }
  double gain() const { return gain_; }

 private:
  double gain_;
};

GainPtr rayleigh();

/// Thrown by fpr_eq_inverse when the equivalent gain is at or beyond
/// (e^{2C} - 1) / P, which no fading gain reaches.
class UnreachableGainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Equivalent fading power gain after compression at rate C:
/// s(1 - e^{-2C}) / (1 + s P e^{-2C}). Accepts s = +inf (returns the limit).
double fpr_eq(double s, const ChannelConfig& cfg);

/// Supremum of fpr_eq over s, (e^{2C} - 1) / P.
double fpr_eq_limit(const ChannelConfig& cfg);

/// Fading gain s with fpr_eq(s) = nu, i.e. nu / (1 - (1 + P nu) e^{-2C}).
double fpr_eq_inverse(double nu, const ChannelConfig& cfg);

/// Law of nu = fpr_eq(s) for s drawn from `base`.
class EquivalentGainDistribution final : public GainDistribution {
 public:
  EquivalentGainDistribution(GainPtr base, const ChannelConfig& cfg);

  double pdf(double u) const override;
  double ccdf(double u) const override;
  double support_upper() const override { return upper_; }
  std::string name() const override { return "equivalent(" + base_->name() + ")"; }

  const ChannelConfig& config() const { return cfg_; }
  const GainDistribution& base() const { return *base_; }

 private:
  GainPtr base_;
  ChannelConfig cfg_;
  double a_;      // 1 - e^{-2C}
  double b_;      // P e^{-2C}
  double upper_;  // a / b
  double guard_;
};

/// Discrete bottleneck-capacity law {(C_i, p_i)}, kept sorted by C_i.
class CapacityDistribution {
 public:
  struct Atom {
    double capacity;
    double probability;
  };

  explicit CapacityDistribution(std::vector<Atom> atoms);
  static CapacityDistribution fixed(double capacity) { return CapacityDistribution({{capacity, 1.0}}); }

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double average() const { return c_avg_; }
  double max_capacity() const { return atoms_.back().capacity; }

  /// Atom index for a uniform variate p in [0, 1).
  std::size_t pick(double p) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  double c_avg_;
};

/// Law of mu = fpr_eq(s, C_b) with C_b independent of s:
/// F_mu(u) = sum_i p_i F_s(u / (1 - (1 + P u) e^{-2 C_i})).
class MixtureGainDistribution final : public GainDistribution {
 public:
  MixtureGainDistribution(GainPtr base, double power, CapacityDistribution caps);

  double pdf(double u) const override;
  double ccdf(double u) const override;
  double support_upper() const override { return upper_; }
  std::string name() const override { return "mixture(" + base_->name() + ")"; }

  const CapacityDistribution& capacities() const { return caps_; }
  double power() const { return power_; }

 private:
  GainPtr base_;
  double power_;
  CapacityDistribution caps_;
  // One component per atom; empty for C_i = 0 (point mass at 0).
  std::vector<std::shared_ptr<const EquivalentGainDistribution>> components_;
  double upper_;
};

std::shared_ptr<const EquivalentGainDistribution> equivalent_distribution(GainPtr base,
                                                                           const ChannelConfig& cfg);
std::shared_ptr<const MixtureGainDistribution> mixture_distribution(GainPtr base, double power,
                                                                    const CapacityDistribution& caps);

}  // namespace ibbc
