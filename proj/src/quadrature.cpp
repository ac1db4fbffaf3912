#include "nws/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include <cmath>
#include <string>
#include <vector>

#include "nws/errors.hpp"

namespace nws {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, unsigned max_depth) {
  QuadratureResult r;
  if (a == b) return r;
  double error = 0.0;
  double l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth,
                                                                          rel_tol, &error, &l1);
  r.error_estimate = error;
  r.l1 = l1;
  if (!std::isfinite(r.value)) throw QuadratureError("quadrature produced a non-finite value");
  if (error > 10.0 * rel_tol * l1 + 1e-300) {
    throw QuadratureError("quadrature did not converge on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]: error estimate " + fmt::format("{:.3g}", error) +
                          " vs L1 " + fmt::format("{:.3g}", l1));
  }
  return r;
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     std::span<const double> breakpoints, double rel_tol,
                                     unsigned max_depth) {
  std::vector<double> cuts{a};
  for (double c : breakpoints) {
    if (c > std::min(a, b) && c < std::max(a, b)) cuts.push_back(c);
  }
  if (a <= b) {
    std::sort(cuts.begin() + 1, cuts.end());
  } else {
    std::sort(cuts.begin() + 1, cuts.end(), std::greater<>());
  }
  cuts.push_back(b);
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const auto part = integrate(f, cuts[i], cuts[i + 1], rel_tol, max_depth);
    total.value += part.value;
    total.error_estimate += part.error_estimate;
    total.l1 += part.l1;
  }
  return total;
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, std::span<const double> breakpoints,
                                       double rel_tol, unsigned max_depth) {
  const auto re = integrate_piecewise([&](double t) { return f(t).real(); }, a, b, breakpoints,
                                      rel_tol, max_depth);
  const auto im = integrate_piecewise([&](double t) { return f(t).imag(); }, a, b, breakpoints,
                                      rel_tol, max_depth);
  return {re.value, im.value};
}

}  // namespace nws
