#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nws/field.hpp"
#include "nws/grid.hpp"
#include "nws/kernel_spec.hpp"
#include "nws/params.hpp"
#include "nws/spectral.hpp"

namespace nws {

/// h_spec(s,t) = C(s) - eps (1 - exp(-(p-1) kappa t)) / kappa, kappa = D (2 pi s)^2 + b.
/// The integrating factor exp((p-1) b t) is kept out of h and reinstated as
/// exp(-b t) on u. Near kappa = 0 a series branch is used.
double h_specific(double s, double t, const PhysicalParams& params, const KernelSpec& kernel);

/// One codomain sample together with its pole status.
struct CodomainValue {
  double value = 0.0;
  /// h at or past a root (sign opposite to C, or |h| <= pole_tol |C|).
  bool pole = false;
  /// h < 0 with an even root order; value is NaN.
  bool branch_failure = false;
};

/// Closed-form solution of the convolutional equation
///   u_t - D u_xx + b u - eps (u * ... * u) = 0        (p factors)
/// in the codomain: u(s,t) = g(s,t) exp(-b t) h_spec(s,t)^m, m = -1/(p-1).
class ConvSolution {
 public:
  explicit ConvSolution(PhysicalParams params, KernelSpec kernel = {});

  const PhysicalParams& params() const { return params_; }
  const KernelSpec& kernel() const { return kernel_; }
  double exponent() const { return exponent_; }

  double h(double s, double t) const { return h_specific(s, t, params_, kernel_); }
  /// F = exp(-b t) h^m, applying the pole policy.
  CodomainValue F(double s, double t) const;
  CodomainValue u(double s, double t) const;

  /// Applies h^m and the pole policy to an externally computed h.
  /// `scale` multiplies the result (g exp(-b t) for u).
  CodomainValue assemble(double s, double h_value, double scale) const;

 private:
  PhysicalParams params_;
  KernelSpec kernel_;
  double exponent_;
};

struct CodomainSolution {
  SpectralField u;
  /// Grid indices flagged as poles or branch failures; excluded from norms.
  std::vector<std::size_t> poles;
  std::vector<std::size_t> branch_failures;
  bool clean() const { return poles.empty() && branch_failures.empty(); }
};

/// u(s,t) at every grid frequency. Throws PoleError or BranchError under PolePolicy::error.
CodomainSolution solve_codomain(double t, const ConvSolution& solution, const SpectralGrid& grid);

/// Default Nyquist-to-peak ratio accepted by the aliasing guard.
inline constexpr double kAliasingFloor = 1e-6;

struct PhysicalSolution {
  std::vector<double> u;
  /// True when the codomain field held a pole; u is then all NaN.
  bool pole = false;
  double imag_residue = 0.0;
};

/// Inverse transform of solve_codomain. Requires t > 0. Throws AliasingError
/// when |u(s_nyquist)| exceeds `aliasing_floor` times the peak.
PhysicalSolution solve_physical(double t, const ConvSolution& solution, const TransformPlan& plan,
                                double aliasing_floor = kAliasingFloor);

struct ResidualValue {
  double absolute = 0.0;
  /// Largest magnitude among the terms of the identity.
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? absolute / scale : absolute; }
};

/// |F' g + b F g - eps F^p g^p| at (s,t), F' by a 5-point central difference.
/// Requires 0 < dt <= 1e-3 t; throws PoleError within 10 dt of a root.
ResidualValue bernoulli_residual(const ConvSolution& solution, double s, double t, double dt);

/// |u_t + (D (2 pi s)^2 + b) u - eps u^p| at (s,t), same stencil and guards.
ResidualValue codomain_ode_residual(const ConvSolution& solution, double s, double t, double dt);

enum class RootRegime { no_root, root_at, asymptotic_infinity };
std::string_view to_string(RootRegime r);

struct RootReport {
  std::optional<double> t0;
  RootRegime regime = RootRegime::no_root;
  std::optional<double> formula_t0;
  std::optional<double> bisection_t0;
  /// |formula - bisection| when both exist.
  double difference = 0.0;
  double s = 0.0;
  double C = 1.0;
  double eps = 0.0;
  double b = 0.0;
  int p = 2;
};

/// Root of h_spec(s, .) from t0 = ln(eps / (eps - C kappa)) / ((p-1) kappa),
/// cross-checked by bisection on [0, t_max]. Throws InvalidArgument when kappa (p-1) = 0.
RootReport root_locus(const PhysicalParams& params, const KernelSpec& kernel, double s = 0.0,
                      double t_max = 1e4);

/// sup over the grid of |h_spec^m - 1| for each p. Requires C = 1 and |eps| <= 1.
std::vector<double> large_p_limit(const PhysicalParams& base, std::span<const int> orders,
                                  double t, const SpectralGrid& grid);

struct Forcing {
  /// Codomain forcing k(s, t).
  std::function<Complex(double s, double t)> k;
  /// Initial profile u(s, 0) = B(s).
  std::function<Complex(double s)> B;
  /// Times where k has kinks or switches; passed to the quadrature.
  std::vector<double> breakpoints;
};

/// Forced solution
///   u = g e^{-bt} h^m \int_0^t k g^{-1} e^{b tau} h(s,-tau)^m dtau + B g e^{-bt} h^m,
/// with g(s,t)/g(s,tau) merged so that no factor overflows.
SpectralField solve_forced(double t, const ConvSolution& solution, const SpectralGrid& grid,
                           const Forcing& forcing);

enum class KernelMode { product_K1, convolution_K2 };

/// Extra spatial kernels K_1..K_n given by their codomain profiles.
///   product_K1:     K = K_1 K_2 ... K_n, khat = k_1 * ... * k_n (grid convolution),
///                   weight khat^(p-1), and u carries the extra factor khat.
///   convolution_K2: K = K_1 * ... * K_n, khat = k_1 ... k_n, weight khat^n.
/// h = C - eps (p-1) \int_0^t weight g^(p-1) e^{-(p-1) b tau} dtau by quadrature.
CodomainSolution solve_with_kernels(double t, const ConvSolution& solution,
                                    const SpectralGrid& grid,
                                    std::span<const std::function<double(double)>> kernels,
                                    KernelMode mode);

/// Four-erfc small-eps approximation of the p = 2 solution, term by term:
///   G e^{-bt} + eps/(4 sqrt(Db)) [e^{-x r} erfc((2 sqrt(Db) t - x)/(2 sqrt(Dt))) + (x -> -x)]
///   - eps e^{-bt}/(4 sqrt(2Db)) [e^{-x r2} erfc((2 sqrt(2Db) t - x)/(2 sqrt(2Dt))) + (x -> -x)]
/// with r = sqrt(b/D), r2 = sqrt(b/(2D)). Requires p = 2, |eps| <= 0.1, t > 0, b > 0.
double fisher_erfc_approx(double x, double t, const PhysicalParams& params);

/// Exact inverse transform of the three-term expansion
///   g e^{-bt} + eps g e^{-bt}/kappa - eps g^2 e^{-2bt}/kappa,
/// i.e. the last pair evaluated at time 2t rather than with D doubled.
double fisher_erfc_corrected(double x, double t, const PhysicalParams& params);

}  // namespace nws
