#include "ibbc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <sstream>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace ibbc::numerics {

void Tolerance::validate() const {
  if (!(rel > 0.0)) throw std::invalid_argument("Tolerance: rel must be > 0");
  if (!(abs >= 0.0)) throw std::invalid_argument("Tolerance: abs must be >= 0");
  if (max_iter < 1) throw std::invalid_argument("Tolerance: max_iter must be >= 1");
}

namespace {

std::string bracket_message(double lo, double hi, double f_lo, double f_hi) {
  std::ostringstream os;
  os.precision(17);
  os << "root not bracketed: f(" << lo << ")=" << f_lo << ", f(" << hi << ")=" << f_hi;
  return os.str();
}

std::string nonfinite_message(const std::string& where, double x) {
  std::ostringstream os;
  os.precision(17);
  os << where << ": non-finite function value at x=" << x;
  return os.str();
}

}  // namespace

BracketError::BracketError(double lo_, double hi_, double f_lo_, double f_hi_)
    : NumericsError(bracket_message(lo_, hi_, f_lo_, f_hi_)),
      lo(lo_),
      hi(hi_),
      f_lo(f_lo_),
      f_hi(f_hi_) {}

ConvergenceError::ConvergenceError(const std::string& what, double estimate_, double error_bound_)
    : NumericsError(what), estimate(estimate_), error_bound(error_bound_) {}

NonFiniteError::NonFiniteError(const std::string& where, double x_)
    : NumericsError(nonfinite_message(where, x_)), x(x_) {}

double IntegralResult::checked(const std::string& context) const {
  if (!converged) {
    std::ostringstream os;
    os.precision(6);
    os << context << ": quadrature did not converge (estimate " << value << ", error bound " << error
       << ", " << intervals << " intervals)";
    throw ConvergenceError(os.str(), value, error);
  }
  return value;
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

struct Piece {
  double origin;
  bool tail;  // [origin, inf) mapped to t in [0, 1)
};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  std::size_t piece;
};

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const { return x.error < y.error; }
};

class Integrand {
 public:
  Integrand(const ScalarFn& f, const std::vector<Piece>& pieces) : f_(f), pieces_(pieces) {}

  double operator()(std::size_t piece, double x) const {
    const Piece& p = pieces_[piece];
    double y;
    if (p.tail) {
      const double one_minus = 1.0 - x;
      const double u = p.origin + x / one_minus;
      y = f_(u) / (one_minus * one_minus);
      if (!std::isfinite(y)) throw NonFiniteError("integrate", u);
    } else {
      y = f_(x);
      if (!std::isfinite(y)) throw NonFiniteError("integrate", x);
    }
    return y;
  }

 private:
  const ScalarFn& f_;
  const std::vector<Piece>& pieces_;
};

Segment kronrod15(const Integrand& g, std::size_t piece, double a, double b) {
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = g(piece, c);
  double kr = fc * wk[0];
  double ga = fc * wg[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double sum = g(piece, c + h * xk[i]) + g(piece, c - h * xk[i]);
    kr += sum * wk[i];
    if (i % 2 == 0) ga += sum * wg[i / 2];
  }
  return Segment{a, b, kr * h, std::abs(kr - ga) * h, piece};
}

}  // namespace

IntegralResult integrate(const ScalarFn& f, double a, double b, const Tolerance& tol) {
  return integrate(f, a, b, {}, tol);
}

IntegralResult integrate(const ScalarFn& f, double a, double b, std::vector<double> breakpoints,
                         const Tolerance& tol) {
  tol.validate();
  if (std::isnan(a) || std::isnan(b) || std::isinf(a)) {
    throw std::invalid_argument("integrate: lower limit must be finite");
  }
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, std::move(breakpoints), tol);
    r.value = -r.value;
    return r;
  }

  std::erase_if(breakpoints, [&](double x) { return !(x > a && x < b) || !std::isfinite(x); });
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  std::vector<double> edges;
  edges.reserve(breakpoints.size() + 2);
  edges.push_back(a);
  edges.insert(edges.end(), breakpoints.begin(), breakpoints.end());
  edges.push_back(b);

  std::vector<Piece> pieces;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (std::isinf(edges[i + 1])) {
      pieces.push_back({edges[i], true});
      spans.emplace_back(0.0, 1.0);
    } else {
      pieces.push_back({0.0, false});
      spans.emplace_back(edges[i], edges[i + 1]);
    }
  }

  const Integrand g(f, pieces);
  std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Segment s = kronrod15(g, i, spans[i].first, spans[i].second);
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }

  int iterations = 0;
  while (total_err > std::max(tol.abs, tol.rel * std::abs(total)) && iterations < tol.max_iter) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted at machine precision
    heap.pop();
    const Segment left = kronrod15(g, worst.piece, worst.a, mid);
    const Segment right = kronrod15(g, worst.piece, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++iterations;
  }

  // Resum to shed drift from the running updates.
  IntegralResult out;
  out.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
    heap.pop();
  }
  out.converged = out.error <= std::max(tol.abs, tol.rel * std::abs(out.value));
  return out;
}

// ---------------------------------------------------------------------------
// Root finding

double find_root(const ScalarFn& f, double lo, double hi, const Tolerance& tol) {
  tol.validate();
  if (!(lo <= hi)) throw std::invalid_argument("find_root: requires lo <= hi");
  auto checked_f = [&](double x) {
    const double y = f(x);
    if (std::isnan(y)) throw NonFiniteError("find_root", x);
    return y;
  };
  const double f_lo = checked_f(lo);
  const double f_hi = checked_f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) throw BracketError(lo, hi, f_lo, f_hi);

  auto close_enough = [&](double a, double b) {
    return std::abs(b - a) <= std::max(tol.abs, tol.rel * std::min(std::abs(a), std::abs(b)));
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(tol.max_iter);
  const auto [a, b] = boost::math::tools::toms748_solve(checked_f, lo, hi, f_lo, f_hi, close_enough, iters);
  if (!close_enough(a, b) && checked_f(a) != 0.0 && checked_f(b) != 0.0) {
    throw ConvergenceError("find_root: iteration budget exhausted", 0.5 * (a + b), std::abs(b - a));
  }
  return std::clamp(0.5 * (a + b), lo, hi);
}

// ---------------------------------------------------------------------------
// Maximization

Maximum maximize_scalar(const ScalarFn& f, double lo, double hi, const Tolerance& tol,
                        int grid_points) {
  tol.validate();
  if (!(lo < hi)) throw std::invalid_argument("maximize_scalar: requires lo < hi");
  if (grid_points < 3) throw std::invalid_argument("maximize_scalar: need at least 3 grid points");

  auto checked_f = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) throw NonFiniteError("maximize_scalar", x);
    return y;
  };

  const bool log_grid = lo > 0.0;
  const double log_lo = log_grid ? std::log(lo) : 0.0;
  const double log_span = log_grid ? std::log(hi) - log_lo : 0.0;
  auto node = [&](int k) {
    if (k == 0) return lo;
    if (k == grid_points - 1) return hi;
    const double t = static_cast<double>(k) / (grid_points - 1);
    return log_grid ? std::exp(log_lo + t * log_span) : lo + t * (hi - lo);
  };

  int best = 0;
  double best_val = checked_f(lo);
  for (int k = 1; k < grid_points; ++k) {
    const double v = checked_f(node(k));
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }

  Maximum out{node(best), best_val};
  const double a = node(std::max(best - 1, 0));
  const double b = node(std::min(best + 1, grid_points - 1));
  std::uintmax_t iters = static_cast<std::uintmax_t>(tol.max_iter);
  const auto [x, neg] = boost::math::tools::brent_find_minima([&](double t) { return -checked_f(t); }, a,
                                                              b, std::numeric_limits<double>::digits / 2,
                                                              iters);
  if (-neg > out.value) out = {x, -neg};
  return out;
}

}  // namespace ibbc::numerics
