#include "nws/spectral.hpp"

#include <fftw3.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "nws/errors.hpp"

namespace nws {

namespace detail {

struct FftPlans {
  std::size_t n = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
  explicit FftPlans(std::size_t size);
  ~FftPlans();
};

namespace {

// The FFTW planner is not thread safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n) : data_(fftw_alloc_complex(n)) {
    if (data_ == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* raw() { return data_; }
  Complex* data() { return reinterpret_cast<Complex*>(data_); }

 private:
  fftw_complex* data_;
};

std::shared_ptr<const FftPlans> plans_for(std::size_t n) {
  // The mutex must outlive the cache, whose plans lock it on destruction.
  std::mutex& mutex = planner_mutex();
  static std::map<std::size_t, std::shared_ptr<const FftPlans>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto plans = std::make_shared<const FftPlans>(n);
  cache.emplace(n, plans);
  return plans;
}

}  // namespace

FftPlans::FftPlans(std::size_t size) : n(size) {
  // Called with planner_mutex held.
  FftwBuffer in(n);
  FftwBuffer out(n);
  const int len = static_cast<int>(n);
  forward = fftw_plan_dft_1d(len, in.raw(), out.raw(), FFTW_FORWARD, FFTW_ESTIMATE);
  backward = fftw_plan_dft_1d(len, in.raw(), out.raw(), FFTW_BACKWARD, FFTW_ESTIMATE);
  if (forward == nullptr || backward == nullptr) throw Error("FFTW planning failed");
}

FftPlans::~FftPlans() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward);
  fftw_destroy_plan(backward);
}

}  // namespace detail

namespace {

double alternating_sign(long k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

TransformPlan::TransformPlan(const SpatialGrid& x, const SpectralGrid& s)
    : x_(x), s_(s), plans_(detail::plans_for(x.size())) {
  if (x.size() != s.size() || x.length() != s.length()) {
    throw InvalidArgument("spatial and spectral grids are not duals");
  }
}

SpectralField TransformPlan::forward(std::span<const Complex> f, double time) const {
  const std::size_t n = x_.size();
  if (f.size() != n) throw InvalidArgument("sample count does not match the grid");
  detail::FftwBuffer in(n);
  detail::FftwBuffer out(n);
  std::copy(f.begin(), f.end(), in.data());
  fftw_execute_dft(plans_->forward, in.raw(), out.raw());
  // s_k x_j = k(-L + j dx)/(2L) = -k/2 + kj/n, so the phase e^{i pi k} factors out.
  std::vector<Complex> v(n);
  const double dx = x_.dx();
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = dx * alternating_sign(s_.wavenumber(i)) * out.data()[s_.fft_bin(i)];
  }
  return {s_, time, std::move(v)};
}

SpectralField TransformPlan::forward(std::span<const double> f, double time) const {
  std::vector<Complex> c(f.begin(), f.end());
  return forward(std::span<const Complex>(c), time);
}

void TransformPlan::check_finite(const SpectralField& F) const {
  if (!(F.grid() == s_)) throw InvalidArgument("field is not on this plan's grid");
  for (const auto& c : F.values()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw InvalidArgument("inverse transform of a non-finite field");
    }
  }
}

std::vector<Complex> TransformPlan::inverse_complex(const SpectralField& F) const {
  check_finite(F);
  const std::size_t n = s_.size();
  detail::FftwBuffer in(n);
  detail::FftwBuffer out(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.data()[s_.fft_bin(i)] = F[i] * alternating_sign(s_.wavenumber(i));
  }
  fftw_execute_dft(plans_->backward, in.raw(), out.raw());
  std::vector<Complex> v(out.data(), out.data() + n);
  const double ds = s_.ds();
  for (auto& c : v) c *= ds;
  return v;
}

TransformPlan::RealSamples TransformPlan::inverse_checked(const SpectralField& F) const {
  const auto c = inverse_complex(F);
  RealSamples out;
  out.values.resize(c.size());
  double max_imag = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    out.values[j] = c[j].real();
    max_imag = std::max(max_imag, std::abs(c[j].imag()));
  }
  const double scale = max_abs(std::span<const Complex>(c));
  out.imag_residue = scale > 0.0 ? max_imag / scale : 0.0;
  return out;
}

std::vector<double> TransformPlan::inverse(const SpectralField& F) const {
  auto r = inverse_checked(F);
  if (r.imag_residue > kImagWarnTol) {
    spdlog::warn("inverse transform: imaginary residue {:.3e} discarded (field not Hermitian)",
                 r.imag_residue);
  }
  return std::move(r.values);
}

namespace {

template <class T>
std::vector<T> convolve_impl(std::span<const T> a, std::span<const T> b, double step) {
  const std::size_t n = a.size();
  if (b.size() != n) throw InvalidArgument("convolution factors differ in length");
  std::vector<T> out(n, T{});
  const std::size_t half = n / 2;
  for (std::size_t j = 0; j < n; ++j) {
    T acc{};
    for (std::size_t m = 0; m < n; ++m) {
      acc += a[m] * b[(j + n + half - m) % n];
    }
    out[j] = acc * step;
  }
  return out;
}

}  // namespace

std::vector<double> circular_convolve(std::span<const double> a, std::span<const double> b,
                                      double step) {
  return convolve_impl(a, b, step);
}

std::vector<Complex> circular_convolve(std::span<const Complex> a, std::span<const Complex> b,
                                       double step) {
  return convolve_impl(a, b, step);
}

std::vector<double> circular_convolve_all(std::span<const std::vector<double>> factors,
                                          double step) {
  if (factors.size() < 2) throw InvalidArgument("need at least two convolution factors");
  std::vector<double> acc = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) {
    acc = circular_convolve(std::span<const double>(acc), std::span<const double>(factors[i]),
                            step);
  }
  return acc;
}

double conv_theorem_residual(const TransformPlan& plan,
                             std::span<const std::vector<double>> factors) {
  const std::size_t n = plan.spatial().size();
  if (factors.size() < 2) throw InvalidArgument("need at least two convolution factors");
  for (const auto& f : factors) {
    if (f.size() != n) throw InvalidArgument("factor length does not match the grid");
  }
  const auto lhs = plan.forward(circular_convolve_all(factors, plan.spatial().dx()));
  std::vector<Complex> rhs(n, Complex{1.0, 0.0});
  for (const auto& f : factors) {
    const auto F = plan.forward(f);
    for (std::size_t i = 0; i < n; ++i) rhs[i] *= F[i];
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(lhs[i] - rhs[i]));
  const double scale = max_abs(std::span<const Complex>(rhs));
  return diff / (scale > 0.0 ? scale : 1.0);
}

std::vector<double> periodic_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = five_point(f[(j + n - 2) % n], f[(j + n - 1) % n], f[(j + 1) % n], f[(j + 2) % n], h);
  }
  return d;
}

DistributionResiduals derivative_distribution_residual(
    const SpatialGrid& grid, const std::vector<std::vector<double>>& G_family,
    const std::vector<std::vector<double>>& f_family, double dt) {
  const std::size_t m = G_family.size();
  if (m < 5 || f_family.size() != m) {
    throw InvalidArgument("derivative residual needs at least 5 equally spaced time samples");
  }
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  for (std::size_t q = 0; q < m; ++q) {
    if (G_family[q].size() != n || f_family[q].size() != n) {
      throw InvalidArgument("family sample count does not match the grid");
    }
  }
  auto conv = [dx](const std::vector<double>& a, const std::vector<double>& b) {
    return circular_convolve(std::span<const double>(a), std::span<const double>(b), dx);
  };
  std::vector<std::vector<double>> Gf(m);
  for (std::size_t q = 0; q < m; ++q) Gf[q] = conv(G_family[q], f_family[q]);

  auto time_derivative = [&](const std::vector<std::vector<double>>& fam, std::size_t q) {
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
      d[j] = five_point(fam[q - 2][j], fam[q - 1][j], fam[q + 1][j], fam[q + 2][j], dt);
    }
    return d;
  };

  DistributionResiduals r;
  for (std::size_t q = 2; q + 2 < m; ++q) {
    const auto dGf = time_derivative(Gf, q);
    const auto Gt_f = conv(time_derivative(G_family, q), f_family[q]);
    const auto ft_G = conv(time_derivative(f_family, q), G_family[q]);
    for (std::size_t j = 0; j < n; ++j) {
      r.time_derivative = std::max(r.time_derivative, std::abs(dGf[j] - (Gt_f[j] + ft_G[j])));
    }

    const auto dx_Gf = periodic_derivative(Gf[q], dx);
    const auto Gx_f = conv(periodic_derivative(G_family[q], dx), f_family[q]);
    const auto fx_G = conv(periodic_derivative(f_family[q], dx), G_family[q]);
    for (std::size_t j = 0; j < n; ++j) {
      r.space_derivative = std::max(r.space_derivative, std::abs(dx_Gf[j] - Gx_f[j]));
      r.space_derivative_swapped =
          std::max(r.space_derivative_swapped, std::abs(dx_Gf[j] - fx_G[j]));
    }
  }
  return r;
}

std::vector<double> spectral_second_derivative(const TransformPlan& plan,
                                               std::span<const double> f) {
  const auto F = plan.forward(f);
  const auto& sg = plan.spectral();
  std::vector<Complex> v(F.values().begin(), F.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = 2.0 * std::numbers::pi * sg.s(i);
    v[i] *= -w * w;
  }
  // The Nyquist mode has no Hermitian partner; drop it so the result stays real.
  v[0] = 0.0;
  return plan.inverse_checked(SpectralField(sg, F.time(), std::move(v))).values;
}

double wraparound_mass(std::span<const double> f, double fraction) {
  const std::size_t n = f.size();
  const auto edge = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  double total = 0.0;
  double outer = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    total += std::abs(f[j]);
    if (j < edge || j + edge >= n) outer += std::abs(f[j]);
  }
  return total > 0.0 ? outer / total : 0.0;
}

double l2_norm_squared(std::span<const double> f, double dx) {
  double acc = 0.0;
  for (double v : f) acc += v * v;
  return acc * dx;
}

double l2_norm_squared(std::span<const Complex> F, double ds) {
  double acc = 0.0;
  for (const auto& c : F) acc += std::norm(c);
  return acc * ds;
}

}  // namespace nws
