#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "nws/field.hpp"
#include "nws/greens.hpp"
#include "nws/kernel_spec.hpp"
#include "nws/params.hpp"
#include "nws/spectral.hpp"

namespace nws {

/// Which rescaling of (D, b, eps) the multiplicative solution is claimed to satisfy.
enum class ScalingHypothesis { sqrt_np1, times_np1, none };
std::string_view to_string(ScalingHypothesis h);
ScalingHypothesis scaling_hypothesis_from_string(std::string_view s);
/// Factor applied to D, b and eps under the hypothesis for root order n.
double hypothesis_factor(ScalingHypothesis h, int n);

/// Solution earliest time; the family is singular at t = 0.
inline constexpr double kMultMinTime = 0.01;

/// Plan for the multiplicative equation u_t - D u_xx + b u - eps u^p = 0 solved
/// through the rooted kernel G^(1/n):
///   u(s,t) = g'(s,t) h(s,t)^m,   m = 1/(1-p),
///   h = (1/mu(t)) [C + K \int_{t_ref}^t e^{c tau} tau^(-alpha) dtau],
///   mu = e^{(1-p) n b t} t^{(1-p)(n-1)/(2n)},  K = eps (1-p) sqrt(n) (4 pi D)^{(1-n)/(2n)},
///   c = (1-p) n b + (n-1) D (2 pi s)^2,       alpha = p (n-1)/(2n).
/// n = p + 1 under FactorCountConvention::factors and n = p under operators.
/// The lower limit t_ref is 0 when alpha < 1 (integrable) and kMultMinTime otherwise.
class MultSolverPlan {
 public:
  explicit MultSolverPlan(PhysicalParams params, KernelSpec kernel = {},
                          ScalingHypothesis hypothesis = ScalingHypothesis::none);

  const PhysicalParams& params() const { return params_; }
  const KernelSpec& kernel() const { return kernel_; }
  ScalingHypothesis hypothesis() const { return hypothesis_; }
  int n() const { return n_; }
  double m() const { return 1.0 / (1.0 - params_.p()); }
  /// Exponent of the endpoint singularity tau^(-alpha).
  double alpha() const;
  double lower_limit() const;
  /// tau = sigma^beta with beta = 1/(1 - alpha) makes the integrand bounded; 1 when unused.
  double substitution_power() const;
  RootedKernelParams rooted() const { return RootedKernelParams(params_, n_); }

 private:
  PhysicalParams params_;
  KernelSpec kernel_;
  ScalingHypothesis hypothesis_;
  int n_;
};

/// Successive-refinement certificate of one quadrature.
struct QuadratureCertificate {
  double value = 0.0;
  double error_estimate = 0.0;
  /// Same integral at half the relative tolerance.
  double value_refined = 0.0;
  double change = 0.0;
  /// change <= max(error_estimate, tol |value|).
  bool honored = false;
};

/// h in sign/log form: h = sign * exp(log_abs). Avoids overflow of e^{c t}.
struct MultH {
  double sign = 1.0;
  double log_abs = 0.0;
  QuadratureCertificate certificate;
  double value() const;
};

/// h(s,t) by quadrature of the general integral. Requires t >= kMultMinTime.
MultH h_mult_quadrature(double s, double t, const MultSolverPlan& plan);

/// Gaussian-source form of h, with no integration constant:
///   h = eps (1-p) e^{bt} \int_{t_ref}^t S_{p-2}(s,tau) e^{-b tau} dtau
/// where S_i is the i-th self-convolution of g from the chosen source.
/// t_ref = 0 for p = 2 and kMultMinTime otherwise.
double h_mult_corollary(double s, double t, const MultSolverPlan& plan, SelfConvSource source,
                        const SpectralGrid& grid);

struct MultSolution {
  std::vector<double> u;
  /// Codomain samples that were flagged (h at or past a sign change from s = 0,
  /// or non-finite) and set to zero before inversion.
  std::vector<std::size_t> flagged;
  /// Negative h with an even root order.
  std::vector<std::size_t> branch_failures;
  double imag_residue = 0.0;
};

/// u = inverse(g'(s,t) h(s,t)^m). Requires t >= kMultMinTime.
MultSolution solve_mult(double t, const MultSolverPlan& plan, const TransformPlan& transform);

/// Same assembly with the corollary h plus the homogeneous term C e^{(p-1) b t},
/// and g in place of g'.
MultSolution solve_mult_corollary(double t, const MultSolverPlan& plan,
                                  const TransformPlan& transform, SelfConvSource source);

enum class PhysicalNonlinearity { multiplicative, convolution };

/// max over the interior (outer 10% excluded) of
///   |u_t - D' u_xx + b' u - eps' N(u)|
/// at the central time of the family, primed coefficients scaled by the hypothesis.
/// u_t by a 5-point stencil in time, u_xx spectrally. Needs >= 5 equally spaced times.
struct PdeResidual {
  double absolute = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? absolute / scale : absolute; }
};
PdeResidual pde_residual_physical(const std::vector<std::vector<double>>& u_family, double dt,
                                  const PhysicalParams& params, ScalingHypothesis hypothesis,
                                  int root_order, const TransformPlan& transform,
                                  PhysicalNonlinearity nonlinearity);

struct FisherConstantProb {
  double value = 0.0;
  /// eps * prob_product > 0: grows in time, no decay.
  bool grows = false;
};

/// G(x,t) e^{eps P t}.
FisherConstantProb fisher_constant_prob(double x, double t, double D, double eps,
                                        double prob_product);

/// u(s,t) = g h^{-1},  h = exp(eps \int_0^t W(s,tau) dtau),
/// W = P g                                     (no spectra),
/// W = P (g * phat_1 * ... * phat_k)(s)          (grid convolution, ds-scaled).
SpectralField fisher_quadratic(double t, const PhysicalParams& params, const SpectralGrid& grid,
                               std::span<const std::function<double(double)>> spectra,
                               double prob_product = 1.0, double quad_rel_tol = 1e-10);

}  // namespace nws
