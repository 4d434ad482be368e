// Monotone correction of the stationary residual-power profile.
//
// Integrating the average rate by parts gives
//
//   R_avg = 1/2 * integral [ S(u) I/(1 + I u) - g(u) ln(1 + I u) ] du,
//
// which is concave in I pointwise and maximized at I*(u). With I constrained
// to be non-increasing, each region where I* rises is replaced by a level c on
// [a, b] with I*(a) = I*(b) = c and
//
//   Phi(c) = integral_a^b dphi/dI(u, c) du = 0.
//
// Phi is strictly decreasing in c (the boundary terms vanish because the
// marginal is zero where I* = c), so c is found by bracketed root finding.
// A discrete pool-adjacent-violators pass over the scan samples locates the
// regions and seeds the brackets.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "layering.hpp"

namespace ibbc::detail {

namespace {

const numerics::Tolerance kRootTol{.rel = 1e-14, .abs = 1e-300, .max_iter = 400};
const numerics::Tolerance kQuadTol{.rel = 1e-12, .abs = 1e-15, .max_iter = 500};

struct Block {
  std::size_t lo;  // first sample index
  std::size_t hi;  // one past the last
  double level;
};

class Pava {
 public:
  Pava(const Profile& profile, double power, const ProfileSamples& s, std::size_t first, std::size_t last,
       double u0, double u1)
      : profile_(profile), power_(power), s_(s) {
    for (std::size_t k = first; k <= last; ++k) {
      const double left = k == first ? u0 : 0.5 * (s.x[k - 1] + s.x[k]);
      const double right = k == last ? u1 : 0.5 * (s.x[k] + s.x[k + 1]);
      weight_.push_back(right - left);
      survival_.push_back(profile.gain.ccdf(s.x[k]) - profile.lambda);
      density_.push_back(profile.gain.pdf(s.x[k]));
    }
    first_ = first;
  }

  std::vector<Block> run() {
    std::vector<Block> blocks;
    for (std::size_t k = 0; k < weight_.size(); ++k) {
      const std::size_t idx = first_ + k;
      blocks.push_back({idx, idx + 1, std::clamp(s_.value[idx], 0.0, power_)});
      while (blocks.size() > 1) {
        const Block& prev = blocks[blocks.size() - 2];
        const Block& cur = blocks.back();
        if (!(prev.level < cur.level - 1e-12 * std::max(1.0, std::abs(prev.level)))) break;
        Block merged{prev.lo, cur.hi, 0.0};
        merged.level = level(merged.lo, merged.hi);
        blocks.pop_back();
        blocks.back() = merged;
      }
    }
    return blocks;
  }

 private:
  double slope(std::size_t lo, std::size_t hi, double c) const {
    double sum = 0.0;
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const std::size_t k = idx - first_;
      const double u = s_.x[idx];
      const double x = 1.0 + c * u;
      sum += weight_[k] * (survival_[k] / (x * x) - density_[k] * u / x);
    }
    return sum;
  }

  double level(std::size_t lo, std::size_t hi) const {
    if (slope(lo, hi, 0.0) <= 0.0) return 0.0;
    if (slope(lo, hi, power_) >= 0.0) return power_;
    return numerics::find_root([&](double c) { return slope(lo, hi, c); }, 0.0, power_, kRootTol);
  }

  const Profile& profile_;
  double power_;
  const ProfileSamples& s_;
  std::size_t first_ = 0;
  std::vector<double> weight_, survival_, density_;
};

std::string where(double u) {
  std::ostringstream os;
  os.precision(8);
  os << u;
  return os.str();
}

class Refiner {
 public:
  Refiner(const Profile& profile, const ProfileSamples& s, std::size_t lo, std::size_t hi)
      : profile_(profile), s_(s), lo_(lo), hi_(hi) {}

  /// First descent of I* through c, searching right from sample lo_.
  double left_crossing(double c) const {
    std::size_t m = lo_ + 1;
    while (m < hi_ && s_.value[m] > c) ++m;
    return numerics::find_root([&](double u) { return profile_(u) - c; }, s_.x[m - 1], s_.x[m], kRootTol);
  }

  /// Last descent of I* through c, searching left from sample hi_.
  double right_crossing(double c) const {
    std::size_t m = hi_ - 1;
    while (m > lo_ && s_.value[m] < c) --m;
    return numerics::find_root([&](double u) { return profile_(u) - c; }, s_.x[m], s_.x[m + 1], kRootTol);
  }

  double balance(double c) const {
    const double a = left_crossing(c);
    const double b = right_crossing(c);
    if (!(a < b)) return 0.0;
    return numerics::integrate([&](double u) { return profile_.marginal(u, c); }, a, b, kQuadTol)
        .checked("ironing balance");
  }

 private:
  const Profile& profile_;
  const ProfileSamples& s_;
  std::size_t lo_;
  std::size_t hi_;
};

}  // namespace

std::vector<IronedInterval> iron(const Profile& profile, double power, const ProfileSamples& s, double u0,
                                 double u1) {
  std::size_t first = 0;
  while (first < s.x.size() && s.x[first] <= u0) ++first;
  std::size_t last = first;
  while (last + 1 < s.x.size() && s.x[last + 1] < u1) ++last;
  if (first >= s.x.size() || s.x[last] >= u1) return {};

  const auto blocks = Pava(profile, power, s, first, last, u0, u1).run();
  const double tol = 1e-9 * std::max(1.0, power);

  std::vector<IronedInterval> out;
  for (const Block& b : blocks) {
    bool rises = false;
    for (std::size_t k = b.lo + 1; k < b.hi; ++k) rises = rises || s.value[k] > s.value[k - 1] + tol;
    if (!rises) continue;
    if (b.level <= 0.0 || b.level >= power) {
      throw NonMonotoneError(s.x[b.lo], "ironed level reaches the power bound near u=" + where(s.x[b.lo]));
    }

    double block_min = s.value[b.lo];
    double block_max = s.value[b.lo];
    for (std::size_t k = b.lo; k < b.hi; ++k) {
      block_min = std::min(block_min, s.value[k]);
      block_max = std::max(block_max, s.value[k]);
    }

    bool done = false;
    for (std::size_t margin = 4; margin <= 256 && !done; margin *= 2) {
      const std::size_t lo = b.lo > first + margin ? b.lo - margin : first;
      const std::size_t hi = std::min(b.hi - 1 + margin, last);
      const double c_lo = std::max(s.value[hi], block_min);
      const double c_hi = std::min(s.value[lo], block_max);
      if (!(c_lo < c_hi)) continue;
      const double pad = 1e-9 * (c_hi - c_lo);
      const Refiner refine(profile, s, lo, hi);
      const double phi_lo = refine.balance(c_lo + pad);
      const double phi_hi = refine.balance(c_hi - pad);
      if (!(phi_lo > 0.0 && phi_hi < 0.0)) continue;
      const double c = numerics::find_root([&](double level) { return refine.balance(level); }, c_lo + pad,
                                           c_hi - pad, kRootTol);
      out.push_back({refine.left_crossing(c), refine.right_crossing(c), c});
      done = true;
    }
    if (!done) throw NonMonotoneError(s.x[b.lo], "could not iron the profile near u=" + where(s.x[b.lo]));
  }

  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
  for (std::size_t k = 0; k < out.size(); ++k) {
    const bool inside = out[k].lo > u0 && out[k].hi < u1;
    const bool disjoint = k == 0 || out[k - 1].hi < out[k].lo;
    if (!inside || !disjoint) {
      throw NonMonotoneError(out[k].lo, "ironed intervals overlap or touch the span ends near u=" + where(out[k].lo));
    }
  }
  return out;
}

}  // namespace ibbc::detail
