#include "nws/greens.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "nws/errors.hpp"
#include "nws/spectral.hpp"

namespace nws {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_time(double t, const char* what) {
  if (!(t > 0.0)) throw InvalidArgument(std::string(what) + ": t must be positive");
}

void require_positive_D(double D) {
  if (!(D > 0.0)) throw InvalidArgument("D must be positive");
}

// erfc(z) e^{z^2} for z >= 20 by its asymptotic series; truncation error < 1e-13.
double erfcx_asymptotic(double z) {
  const double r = 1.0 / (2.0 * z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -static_cast<double>(2 * k - 1) * r;
    sum += term;
  }
  return sum / (z * std::sqrt(kPi));
}

std::vector<double> sample_gauss(const SpectralGrid& grid, double t, double D) {
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = gauss_codomain(grid.s(i), t, D);
  return g;
}

}  // namespace

double heat_kernel(double x, double t, double D) {
  require_positive_time(t, "heat_kernel");
  require_positive_D(D);
  return std::exp(-x * x / (4.0 * D * t)) / std::sqrt(4.0 * kPi * D * t);
}

double gauss_codomain(double s, double t, double D) {
  const double w = 2.0 * kPi * s;
  return std::exp(-D * w * w * t);
}

RootedKernelParams::RootedKernelParams(PhysicalParams base, int n) : base_(base), n_(n) {
  if (n < 2) throw InvalidArgument("root order n must be >= 2");
}

double RootedKernelParams::exponent() const {
  return (1.0 - n_) / (2.0 * n_);
}

double rooted_codomain(double s, double t, const RootedKernelParams& params) {
  require_positive_time(t, "rooted_codomain");
  const double D = params.base().D();
  const double n = params.n();
  const double w = 2.0 * kPi * s;
  return std::sqrt(n) * std::exp(-D * w * w * n * t) /
         std::pow(4.0 * kPi * D * t, params.exponent());
}

FactorCountReport rooted_factor_count(const SpectralGrid& grid, double t,
                                      const RootedKernelParams& params) {
  require_positive_time(t, "rooted_factor_count");
  const std::size_t size = grid.size();
  std::vector<double> rooted(size);
  for (std::size_t i = 0; i < size; ++i) rooted[i] = rooted_codomain(grid.s(i), t, params);
  const auto g = sample_gauss(grid, t, params.base().D());

  auto error_after = [&](int factors) {
    std::vector<double> acc = rooted;
    for (int f = 1; f < factors; ++f) {
      acc = circular_convolve(std::span<const double>(acc), std::span<const double>(rooted),
                              grid.ds());
    }
    double e = 0.0;
    for (std::size_t i = 0; i < size; ++i) e = std::max(e, std::abs(acc[i] - g[i]));
    return e / max_abs(std::span<const double>(g));
  };

  FactorCountReport r;
  r.root_order = params.n();
  r.error_n_factors = error_after(params.n());
  r.error_n_minus_1_factors = error_after(params.n() - 1);
  r.reproducing = r.error_n_factors <= r.error_n_minus_1_factors
                      ? FactorCountConvention::operators
                      : FactorCountConvention::factors;
  return r;
}

double iterated_gauss_selfconv(double s, double t, double D, int i, SelfConvSource source,
                               const SpectralGrid& grid) {
  require_positive_time(t, "iterated_gauss_selfconv");
  require_positive_D(D);
  if (i < 0) throw InvalidArgument("self-convolution index must be >= 0");
  const double w = 2.0 * kPi * s;
  if (source == SelfConvSource::closed_form) {
    const double a = 4.0 * kPi * D * t;
    return std::sqrt(a) * std::exp(-w * w * D * t / (i + 1)) /
           (std::pow(a, i + 1) * std::sqrt(static_cast<double>(i + 1)));
  }
  if (i == 0) return gauss_codomain(s, t, D);
  // i - 1 convolutions on the grid, then the last one evaluated at s directly.
  const auto g = sample_gauss(grid, t, D);
  std::vector<double> acc = g;
  for (int k = 1; k < i; ++k) {
    acc = circular_convolve(std::span<const double>(acc), std::span<const double>(g), grid.ds());
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    sum += acc[m] * gauss_codomain(s - grid.s(m), t, D);
  }
  return sum * grid.ds();
}

double gauss_selfconv_identity(double s, double t, double D, int i) {
  const double w = 2.0 * kPi * s;
  return std::pow(4.0 * kPi * D * t, -0.5 * i) / std::sqrt(static_cast<double>(i + 1)) *
         std::exp(-w * w * D * t / (i + 1));
}

double lorentzian_pair(double x, double D, double b) {
  if (!(D > 0.0) || !(b > 0.0)) throw InvalidArgument("lorentzian_pair needs D > 0 and b > 0");
  return std::exp(-std::sqrt(b / D) * std::abs(x)) / (2.0 * std::sqrt(D * b));
}

double erfc(double z) { return std::erfc(z); }

double exp_times_erfc(double e, double z) {
  if (z < 20.0) return std::exp(e) * std::erfc(z);
  return std::exp(e - z * z) * erfcx_asymptotic(z);
}

double erfc_pair(double x, double t, double D, double b) {
  require_positive_time(t, "erfc_pair");
  if (!(D > 0.0) || !(b > 0.0)) throw InvalidArgument("erfc_pair needs D > 0 and b > 0");
  const double rate = std::sqrt(b / D);
  const double drift = 2.0 * t * std::sqrt(D * b);
  const double spread = 2.0 * std::sqrt(D * t);
  const double left = exp_times_erfc(b * t - x * rate, (drift - x) / spread);
  const double right = exp_times_erfc(b * t + x * rate, (drift + x) / spread);
  return (left + right) / (4.0 * std::sqrt(D * b));
}

}  // namespace nws
