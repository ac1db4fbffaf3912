#pragma once

#include <complex>
#include <functional>
#include <span>

namespace nws {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  /// \int |f|, the scale the relative tolerance is measured against.
  double l1 = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) on [a, b] with at most `max_depth` bisection
/// levels. Throws QuadratureError when the error estimate stays above
/// 10 * rel_tol * l1 after the last level.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, unsigned max_depth = 20);

/// Same, split at the given interior breakpoints (points outside (a, b) are ignored).
QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     std::span<const double> breakpoints, double rel_tol,
                                     unsigned max_depth = 20);

/// Real and imaginary parts integrated separately.
std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, std::span<const double> breakpoints,
                                       double rel_tol, unsigned max_depth = 20);

}  // namespace nws
