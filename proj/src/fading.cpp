#include "ibbc/fading.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ibbc {

void ChannelConfig::validate() const {
  if (!(power > 0.0) || !std::isfinite(power)) throw std::invalid_argument("ChannelConfig: power must be > 0");
  if (!(capacity >= 0.0)) throw std::invalid_argument("ChannelConfig: capacity must be >= 0");
}

// ---------------------------------------------------------------------------

double GainDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  const double target = 1.0 - p;
  double hi = std::isfinite(support_upper()) ? support_upper() : 1.0;
  while (!std::isfinite(support_upper()) && ccdf(hi) > target) hi *= 2.0;
  return numerics::find_root([&](double u) { return ccdf(u) - target; }, 0.0, hi,
                             {.rel = 1e-14, .abs = 1e-300, .max_iter = 200});
}

double GainDistribution::expect(const numerics::ScalarFn& h, std::vector<double> kinks,
                                const numerics::Tolerance& tol) const {
  const auto integrand = [&](double u) {
    const double w = pdf(u);
    return w == 0.0 ? 0.0 : h(u) * w;
  };
  // A kink deep in the tail would leave a huge finite panel whose samples all
  // miss the mass.
  std::erase_if(kinks, [&](double k) { return !(k > 0.0) || ccdf(k) < 1e-17; });
  return numerics::integrate(integrand, 0.0, support_upper(), std::move(kinks), tol)
      .checked("expect(" + name() + ")");
}

// ---------------------------------------------------------------------------

namespace {

void require_non_negative(double u, const char* what) {
  if (u < 0.0 || std::isnan(u)) throw std::domain_error(std::string(what) + ": negative gain");
}

}  // namespace

double RayleighGain::pdf(double u) const {
  require_non_negative(u, "rayleigh pdf");
  return std::exp(-u);
}

double RayleighGain::ccdf(double u) const {
  require_non_negative(u, "rayleigh ccdf");
  return std::exp(-u);
}

double RayleighGain::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in [0, 1)");
  return -std::log1p(-p);
}

DeterministicGain::DeterministicGain(double gain) : gain_(gain) {
  require_non_negative(gain, "DeterministicGain");
}

double DeterministicGain::expect(const numerics::ScalarFn& h, std::vector<double>,
                                 const numerics::Tolerance&) const {
  return h(gain_);
}

GainPtr rayleigh() { return std::make_shared<RayleighGain>(); }

// ---------------------------------------------------------------------------

double fpr_eq(double s, const ChannelConfig& cfg) {
  if (std::isinf(s)) return fpr_eq_limit(cfg);
  const double e = std::exp(-2.0 * cfg.capacity);
  return s * (-std::expm1(-2.0 * cfg.capacity)) / (1.0 + s * cfg.power * e);
}

double fpr_eq_limit(const ChannelConfig& cfg) { return std::expm1(2.0 * cfg.capacity) / cfg.power; }

double fpr_eq_inverse(double nu, const ChannelConfig& cfg) {
  if (nu < 0.0 || std::isnan(nu)) throw std::domain_error("fpr_eq_inverse: negative equivalent gain");
  const double a = -std::expm1(-2.0 * cfg.capacity);
  const double b = cfg.power * std::exp(-2.0 * cfg.capacity);
  const double denom = a - b * nu;
  if (!(denom > 0.0) || nu >= fpr_eq_limit(cfg)) {
    std::ostringstream os;
    os << "fpr_eq_inverse: equivalent gain " << nu << " is not reachable (limit " << fpr_eq_limit(cfg)
       << ")";
    throw UnreachableGainError(os.str());
  }
  return nu / denom;
}

EquivalentGainDistribution::EquivalentGainDistribution(GainPtr base, const ChannelConfig& cfg)
    : base_(std::move(base)), cfg_(cfg) {
  cfg_.validate();
  if (!(cfg_.capacity > 0.0)) throw std::invalid_argument("EquivalentGainDistribution: requires C > 0");
  a_ = -std::expm1(-2.0 * cfg_.capacity);
  b_ = cfg_.power * std::exp(-2.0 * cfg_.capacity);
  upper_ = fpr_eq_limit(cfg_);
  guard_ = upper_ - 1e-12 * std::max(1.0, upper_);
}

double EquivalentGainDistribution::pdf(double u) const {
  require_non_negative(u, "equivalent pdf");
  if (u >= guard_) return 0.0;
  const double d = a_ - b_ * u;
  const double w = base_->pdf(u / d);
  return w == 0.0 ? 0.0 : w * a_ / (d * d);
}

double EquivalentGainDistribution::ccdf(double u) const {
  require_non_negative(u, "equivalent ccdf");
  const double d = a_ - b_ * u;
  if (u >= upper_ || !(d > 0.0)) return 0.0;
  return base_->ccdf(u / d);
}

// ---------------------------------------------------------------------------

CapacityDistribution::CapacityDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("CapacityDistribution: no atoms");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.capacity >= 0.0) || !std::isfinite(a.capacity)) {
      throw std::invalid_argument("CapacityDistribution: capacities must be finite and >= 0");
    }
    if (!(a.probability >= 0.0)) throw std::invalid_argument("CapacityDistribution: negative probability");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "CapacityDistribution: probabilities sum to " << total << ", not 1";
    throw std::invalid_argument(os.str());
  }
  std::stable_sort(atoms_.begin(), atoms_.end(),
                   [](const Atom& x, const Atom& y) { return x.capacity < y.capacity; });
  c_avg_ = 0.0;
  double running = 0.0;
  for (const auto& a : atoms_) {
    c_avg_ += a.probability * a.capacity;
    running += a.probability;
    cumulative_.push_back(running);
  }
}

std::size_t CapacityDistribution::pick(double p) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), p);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
}

MixtureGainDistribution::MixtureGainDistribution(GainPtr base, double power, CapacityDistribution caps)
    : base_(std::move(base)), power_(power), caps_(std::move(caps)), upper_(0.0) {
  if (!(power_ > 0.0)) throw std::invalid_argument("MixtureGainDistribution: power must be > 0");
  for (const auto& atom : caps_.atoms()) {
    if (atom.capacity > 0.0) {
      components_.push_back(std::make_shared<EquivalentGainDistribution>(base_, ChannelConfig{power_, atom.capacity}));
      upper_ = std::max(upper_, components_.back()->support_upper());
    } else {
      components_.push_back(nullptr);
    }
  }
}

double MixtureGainDistribution::pdf(double u) const {
  require_non_negative(u, "mixture pdf");
  double sum = 0.0;
  const auto atoms = caps_.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (components_[i]) sum += atoms[i].probability * components_[i]->pdf(u);
  }
  return sum;
}

double MixtureGainDistribution::ccdf(double u) const {
  require_non_negative(u, "mixture ccdf");
  double sum = 0.0;
  const auto atoms = caps_.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (components_[i]) sum += atoms[i].probability * components_[i]->ccdf(u);
  }
  return sum;
}

std::shared_ptr<const EquivalentGainDistribution> equivalent_distribution(GainPtr base,
                                                                           const ChannelConfig& cfg) {
  return std::make_shared<EquivalentGainDistribution>(std::move(base), cfg);
}

std::shared_ptr<const MixtureGainDistribution> mixture_distribution(GainPtr base, double power,
                                                                    const CapacityDistribution& caps) {
  return std::make_shared<MixtureGainDistribution>(std::move(base), power, caps);
}

}  // namespace ibbc
