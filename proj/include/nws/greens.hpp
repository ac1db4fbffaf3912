#pragma once

#include "nws/grid.hpp"
#include "nws/kernel_spec.hpp"
#include "nws/params.hpp"

namespace nws {

/// Heat kernel G(x,t) = exp(-x^2/(4Dt)) / sqrt(4 pi D t). Requires t > 0, D > 0.
double heat_kernel(double x, double t, double D);

/// Its codomain image g(s,t) = exp(-D (2 pi s)^2 t).
double gauss_codomain(double s, double t, double D);

/// Root order n >= 2 of the rooted kernel G^(1/n).
class RootedKernelParams {
 public:
  RootedKernelParams(PhysicalParams base, int n);
  const PhysicalParams& base() const { return base_; }
  int n() const { return n_; }
  /// (1 - n) / (2n), always in (-1/2, 0).
  double exponent() const;

 private:
  PhysicalParams base_;
  int n_;
};

/// Codomain image of G^(1/n):
///   g'(s,t) = sqrt(n) exp(-D (2 pi s)^2 n t) / (4 pi D t)^((1-n)/(2n)).
double rooted_codomain(double s, double t, const RootedKernelParams& params);

/// Relative L-inf error of repeated discrete self-convolutions of g' against g.
struct FactorCountReport {
  int root_order = 0;
  /// n factors, i.e. n - 1 convolution operators.
  double error_n_factors = 0.0;
  /// n - 1 factors.
  double error_n_minus_1_factors = 0.0;
  /// The reading of "g' *_(n-1)" whose result reproduces g.
  FactorCountConvention reproducing = FactorCountConvention::operators;
};

FactorCountReport rooted_factor_count(const SpectralGrid& grid, double t,
                                      const RootedKernelParams& params);

enum class SelfConvSource { closed_form, discrete_oracle };

/// The i-th self-convolution of g (i + 1 factors) at frequency s.
///   closed_form:   sqrt(4 pi D t) exp(-(2 pi s)^2 D t/(i+1)) / ((4 pi D t)^(i+1) sqrt(i+1))
///   discrete_oracle: ds-scaled discrete convolution of g sampled on `grid`.
/// i = 0 returns g itself under both sources' conventions (the closed form
/// at i = 0 still carries its prefactor).
double iterated_gauss_selfconv(double s, double t, double D, int i, SelfConvSource source,
                               const SpectralGrid& grid);

/// Continuous-identity value (4 pi D t)^(-i/2) / sqrt(i+1) exp(-(2 pi s)^2 D t/(i+1)).
double gauss_selfconv_identity(double s, double t, double D, int i);

/// Inverse transform of 1/(b + D (2 pi s)^2): exp(-sqrt(b/D)|x|) / (2 sqrt(D b)).
/// The two Heaviside branches are merged; at x = 0 both give the same value.
double lorentzian_pair(double x, double D, double b);

/// Inverse transform of exp(-D (2 pi s)^2 t) / (b + D (2 pi s)^2).
double erfc_pair(double x, double t, double D, double b);

/// Complementary error function (std::erfc).
double erfc(double z);

/// exp(e) * erfc(z) without 0 * inf at large z.
double exp_times_erfc(double e, double z);

}  // namespace nws
