#pragma once

// Scalar numerics shared by every solver: global-adaptive Gauss-Kronrod
// quadrature on finite and semi-infinite ranges, bracketed root finding and
// a grid-then-refine scalar maximizer.

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibbc::numerics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
  int max_iter = 200;

  /// Throws std::invalid_argument unless rel > 0, abs >= 0, max_iter >= 1.
  void validate() const;
};

using ScalarFn = std::function<double(double)>;

class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f(lo) and f(hi) have the same strict sign.
class BracketError : public NumericsError {
 public:
  BracketError(double lo, double hi, double f_lo, double f_hi);
  double lo, hi, f_lo, f_hi;
};

/// Iteration budget exhausted. Carries the best estimate and its error bound.
class ConvergenceError : public NumericsError {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_bound);
  double estimate;
  double error_bound;
};

class NonFiniteError : public NumericsError {
 public:
  NonFiniteError(const std::string& where, double x);
  double x;
};

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = true;

  /// The value, or ConvergenceError when the tolerance was not met.
  double checked(const std::string& context = "integrate") const;
};

/// Integral of f over [a, b]; b may be +infinity, in which case the tail is
/// mapped onto [0, 1) with u = a + t / (1 - t). For a > b the result is
/// minus the integral over [b, a].
IntegralResult integrate(const ScalarFn& f, double a, double b, const Tolerance& tol = {});

/// Same, with the range pre-split at interior breakpoints (kinks, switch points).
/// Breakpoints outside (a, b) are ignored.
IntegralResult integrate(const ScalarFn& f, double a, double b, std::vector<double> breakpoints,
                         const Tolerance& tol = {});

/// Root of f in [lo, hi] via TOMS 748. Never leaves the bracket.
double find_root(const ScalarFn& f, double lo, double hi, const Tolerance& tol = {});

struct Maximum {
  double arg;
  double value;
};

/// Scan `grid_points` points (log spaced if lo > 0, linear otherwise), then
/// refine around the first best grid point with Brent's method. The returned
/// value is never below the best grid value.
Maximum maximize_scalar(const ScalarFn& f, double lo, double hi, const Tolerance& tol = {},
                        int grid_points = 2000);

}  // namespace ibbc::numerics
