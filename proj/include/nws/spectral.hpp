#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "nws/field.hpp"
#include "nws/grid.hpp"

namespace nws {

namespace detail {
struct FftPlans;
}

/// Continuum-consistent discrete Fourier transform on a grid pair, using the
/// ordinary-frequency convention
///   F(s) = \int f(x) e^{-2 pi i s x} dx,   f(x) = \int F(s) e^{2 pi i s x} ds,
/// discretized as F(s_k) = dx sum_j f(x_j) e^{-2 pi i s_k x_j} and
/// f(x_j) = ds sum_k F(s_k) e^{2 pi i s_k x_j}. Since dx ds n = 1 the pair is
/// exactly inverse. Plans are immutable and execution is reentrant.
class TransformPlan {
 public:
  TransformPlan(const SpatialGrid& x, const SpectralGrid& s);
  explicit TransformPlan(const std::pair<SpatialGrid, SpectralGrid>& grids)
      : TransformPlan(grids.first, grids.second) {}

  const SpatialGrid& spatial() const { return x_; }
  const SpectralGrid& spectral() const { return s_; }

  SpectralField forward(std::span<const double> f, double time = 0.0) const;
  SpectralField forward(std::span<const Complex> f, double time = 0.0) const;

  struct RealSamples {
    std::vector<double> values;
    /// max |Im| / max |value| of the complex inverse.
    double imag_residue = 0.0;
  };

  /// Inverse transform with the real part kept and the imaginary residue reported.
  RealSamples inverse_checked(const SpectralField& F) const;
  /// Same, logging a warning when the residue exceeds kImagWarnTol.
  std::vector<double> inverse(const SpectralField& F) const;
  std::vector<Complex> inverse_complex(const SpectralField& F) const;

  static constexpr double kImagWarnTol = 1e-10;

 private:
  void check_finite(const SpectralField& F) const;

  SpatialGrid x_;
  SpectralGrid s_;
  std::shared_ptr<const detail::FftPlans> plans_;
};

/// Circular convolution on a centered grid (origin at index n/2), scaled by
/// the grid step so it approximates the continuous convolution:
///   (a * b)_j = step sum_m a_m b_{(j - m + n/2) mod n}.
/// Direct O(n^2) summation.
std::vector<double> circular_convolve(std::span<const double> a, std::span<const double> b,
                                      double step);
std::vector<Complex> circular_convolve(std::span<const Complex> a, std::span<const Complex> b,
                                       double step);

/// Left fold of circular_convolve over two or more factors.
std::vector<double> circular_convolve_all(std::span<const std::vector<double>> factors,
                                          double step);

/// ||forward(f1 * ... * fm) - prod forward(fi)||_inf / max|prod forward(fi)|.
double conv_theorem_residual(const TransformPlan& plan,
                             std::span<const std::vector<double>> factors);

struct DistributionResiduals {
  /// max |d/dt(G*f) - (G_t*f + f_t*G)|
  double time_derivative = 0.0;
  /// max |d/dx(G*f) - (G_x*f)|
  double space_derivative = 0.0;
  /// max |d/dx(G*f) - (f_x*G)|
  double space_derivative_swapped = 0.0;
};

/// Checks the derivative-distribution identities of the convolution with
/// 5-point central differences: in t (spacing dt over the families) and in x
/// (periodic, grid spacing). Families are indexed [time][grid point].
DistributionResiduals derivative_distribution_residual(
    const SpatialGrid& grid, const std::vector<std::vector<double>>& G_family,
    const std::vector<std::vector<double>>& f_family, double dt);

/// 5-point central difference (f(-2h), f(-h), f(h), f(2h)).
inline double five_point(double fm2, double fm1, double fp1, double fp2, double h) {
  return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}

/// Periodic 5-point first derivative of grid samples.
std::vector<double> periodic_derivative(std::span<const double> f, double h);

/// Spectral second derivative: inverse(-(2 pi s)^2 forward(f)).
std::vector<double> spectral_second_derivative(const TransformPlan& plan,
                                               std::span<const double> f);

/// Fraction of the L1 mass found within the outer `fraction` of the domain at
/// either end; a proxy for wrap-around error of circular convolution.
double wraparound_mass(std::span<const double> f, double fraction = 0.05);

/// Discrete L2 norms with the continuum weights dx and ds.
double l2_norm_squared(std::span<const double> f, double dx);
double l2_norm_squared(std::span<const Complex> F, double ds);

}  // namespace nws
