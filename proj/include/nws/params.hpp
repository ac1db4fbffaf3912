#pragma once

#include <string>
#include <vector>

namespace nws {

/// Unvalidated coefficient record, as read from a config file.
/// p is carried as a double so that non-integer input can be diagnosed.
struct RawParams {
  double D = 1.0;
  double b = 0.0;
  double eps = 0.0;
  double p = 2.0;
};

/// Validated coefficient set {D, b, eps, p} of the reaction-diffusion equation
///   u_t - D u_xx + b u - eps N_p(u) = 0.
/// D > 0, p integer >= 2, all values finite. Immutable.
class PhysicalParams {
 public:
  double D() const { return D_; }
  double b() const { return b_; }
  double eps() const { return eps_; }
  int p() const { return p_; }

  /// Same coefficients with eps replaced; used by sweeps and the linear limit.
  PhysicalParams with_eps(double eps) const;

  bool operator==(const PhysicalParams&) const = default;

 private:
  friend PhysicalParams validate_params(const RawParams& raw);
  PhysicalParams(double D, double b, double eps, int p) : D_(D), b_(b), eps_(eps), p_(p) {}

  double D_;
  double b_;
  double eps_;
  int p_;
};

/// Returns the list of violated constraints; empty when raw is valid.
std::vector<std::string> param_violations(const RawParams& raw);

/// Throws InvalidArgument listing every violated constraint.
PhysicalParams validate_params(const RawParams& raw);

inline PhysicalParams make_params(double D, double b, double eps, int p) {
  return validate_params({D, b, eps, static_cast<double>(p)});
}

}  // namespace nws
