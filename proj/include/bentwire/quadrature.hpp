#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bentwire {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the n-point Gauss-Legendre rule (cached for small n).
const GaussRule& gauss_legendre(int n);

/// Integrates f over [lo, hi] with a fixed n-point Gauss-Legendre rule.
double gauss_integrate(const std::function<double(double)>& f, double lo, double hi, int n = 4);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
  bool converged = false;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_tolerance(achieved) {}
  double achieved_tolerance;
};

struct AdaptiveOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_intervals = 4000;
};

/// Globally adaptive Gauss-Legendre quadrature. The interval is first split at
/// every breakpoint inside (lo, hi); integrable endpoint singularities are
/// resolved by repeated bisection of the worst subinterval. Nodes never touch
/// subinterval endpoints, so f is never evaluated at a breakpoint.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    std::span<const double> breakpoints = {},
                                    const AdaptiveOptions& opts = {});

/// Same as integrate_adaptive but throws QuadratureError when the tolerance is
/// not reached.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 std::span<const double> breakpoints = {}, const AdaptiveOptions& opts = {});

}  // namespace bentwire
