#include "nws/mult_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "nws/errors.hpp"
#include "nws/quadrature.hpp"

namespace nws {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxExp = 700.0;

double spatial_rate(double s, double D) {
  const double w = 2.0 * kPi * s;
  return D * w * w;
}

void require_min_time(double t) {
  if (!(t >= kMultMinTime)) {
    std::ostringstream msg;
    msg << "multiplicative solution is singular at the origin; t must be >= " << kMultMinTime;
    throw InvalidArgument(msg.str());
  }
}

struct IntegralTerm {
  // Integral = exp(log_shift) * value.
  double value = 0.0;
  double log_shift = 0.0;
  QuadratureCertificate certificate;
};

IntegralTerm rooted_integral(double s, double t, const MultSolverPlan& plan, bool certify) {
  const auto& pp = plan.params();
  const int p = pp.p();
  const int n = plan.n();
  const double c = (1.0 - p) * n * pp.b() + (n - 1.0) * spatial_rate(s, pp.D());
  const double alpha = plan.alpha();
  const double t_ref = plan.lower_limit();
  // Shift the exponential by its largest value on [t_ref, t].
  const double r = c >= 0.0 ? t : t_ref;

  // Pieces of the integral. For c > 0 the mass sits at tau = t; that end is integrated
  // in u = t - tau so the exponent carries no cancellation.
  struct Piece {
    std::function<double(double)> f;
    double lo, hi;
  };
  std::vector<Piece> pieces;
  const double split = c > 0.0 ? std::max(t_ref, t / 2.0) : t;
  if (t_ref == 0.0) {
    const double beta = plan.substitution_power();
    pieces.push_back({[=](double sigma) { return beta * std::exp(c * (std::pow(sigma, beta) - r)); },
                      0.0, std::pow(split, 1.0 / beta)});
  } else {
    pieces.push_back(
        {[=](double tau) { return std::exp(c * (tau - r)) * std::pow(tau, -alpha); }, t_ref, split});
  }
  if (split < t) {
    pieces.push_back(
        {[=](double u) { return std::exp(-c * u) * std::pow(t - u, -alpha); }, 0.0, t - split});
  }

  const auto run = [&](double tol) {
    QuadratureResult total;
    for (const auto& piece : pieces) {
      const auto part = integrate(piece.f, piece.lo, piece.hi, tol);
      total.value += part.value;
      total.error_estimate += part.error_estimate;
      total.l1 += part.l1;
    }
    return total;
  };

  const double tol = plan.kernel().quad_rel_tol;
  const auto first = run(tol);
  IntegralTerm out;
  out.value = first.value;
  out.log_shift = c * r;
  out.certificate.value = first.value;
  out.certificate.error_estimate = first.error_estimate;
  if (certify) {
    const auto refined = run(tol / 2.0);
    out.certificate.value_refined = refined.value;
    out.certificate.change = std::abs(refined.value - first.value);
    out.certificate.honored =
        out.certificate.change <=
        first.error_estimate + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(first.value);
  } else {
    out.certificate.value_refined = first.value;
    out.certificate.honored = true;
  }
  return out;
}

MultH compute_h(double s, double t, const MultSolverPlan& plan, bool certify) {
  require_min_time(t);
  const auto& pp = plan.params();
  const int p = pp.p();
  const int n = plan.n();
  const double C = plan.kernel().C(s);
  const double K = pp.eps() * (1.0 - p) * std::sqrt(static_cast<double>(n)) *
                   std::pow(4.0 * kPi * pp.D(), (1.0 - n) / (2.0 * n));
  // log(1/mu(t))
  const double log_inv_mu =
      -(1.0 - p) * n * pp.b() * t + (p - 1.0) * (n - 1.0) / (2.0 * n) * std::log(t);

  MultH h;
  double bracket_sign = 1.0;
  double bracket_log = 0.0;
  if (K == 0.0) {
    if (C == 0.0) {
      bracket_log = -std::numeric_limits<double>::infinity();
    } else {
      bracket_sign = C < 0.0 ? -1.0 : 1.0;
      bracket_log = std::log(std::abs(C));
    }
  } else {
    const auto I = rooted_integral(s, t, plan, certify);
    h.certificate = I.certificate;
    const double kj = K * I.value;
    const double log_kj = std::log(std::abs(kj)) + I.log_shift;
    if (log_kj < kMaxExp) {
      const double bracket = C + kj * std::exp(I.log_shift);
      bracket_sign = bracket < 0.0 ? -1.0 : 1.0;
      bracket_log = std::log(std::abs(bracket));
    } else {
      // C is negligible next to e^{700}.
      bracket_sign = kj < 0.0 ? -1.0 : 1.0;
      bracket_log = log_kj;
    }
  }
  h.sign = bracket_sign;
  h.log_abs = log_inv_mu + bracket_log;
  return h;
}

// u = scale * h^m in log form, with the sign rules of the real root.
std::optional<double> power_of_h(double sign, double log_abs, double log_scale, double m, int p) {
  const bool even_root = (p - 1) % 2 == 0;
  if (sign < 0.0 && even_root) return std::nullopt;
  const double mag = std::exp(log_scale + m * log_abs);
  return sign < 0.0 ? -mag : mag;
}

MultSolution assemble_mult(const TransformPlan& transform, double t,
                           const std::vector<double>& signs, const std::vector<double>& values,
                           const std::vector<bool>& branch) {
  const auto& grid = transform.spectral();
  const std::size_t n = grid.size();
  const std::size_t zero = grid.zero_index();
  MultSolution out;
  std::vector<bool> flag(n, false);
  // Walk outward from s = 0 and cut at the first sign change or non-finite sample.
  for (int dir : {-1, 1}) {
    bool cut = false;
    for (long i = static_cast<long>(zero); i >= 0 && i < static_cast<long>(n); i += dir) {
      const auto k = static_cast<std::size_t>(i);
      if (!cut && (signs[k] != signs[zero] || !std::isfinite(values[k]) || branch[k])) cut = true;
      if (cut) flag[k] = true;
    }
  }
  std::vector<Complex> field(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (branch[i]) out.branch_failures.push_back(i);
    if (flag[i]) {
      out.flagged.push_back(i);
      field[i] = 0.0;
    } else {
      field[i] = values[i];
    }
  }
  auto inv = transform.inverse_checked(SpectralField(grid, t, std::move(field)));
  out.u = std::move(inv.values);
  out.imag_residue = inv.imag_residue;
  return out;
}

}  // namespace

std::string_view to_string(ScalingHypothesis h) {
  switch (h) {
    case ScalingHypothesis::sqrt_np1:
      return "sqrt_np1";
    case ScalingHypothesis::times_np1:
      return "times_np1";
    case ScalingHypothesis::none:
      return "none";
  }
  return "unknown";
}

ScalingHypothesis scaling_hypothesis_from_string(std::string_view s) {
  for (auto h : {ScalingHypothesis::sqrt_np1, ScalingHypothesis::times_np1, ScalingHypothesis::none}) {
    if (to_string(h) == s) return h;
  }
  throw InvalidArgument("unknown scaling hypothesis '" + std::string(s) + "'");
}

double hypothesis_factor(ScalingHypothesis h, int n) {
  switch (h) {
    case ScalingHypothesis::sqrt_np1:
      return std::sqrt(static_cast<double>(n));
    case ScalingHypothesis::times_np1:
      return static_cast<double>(n);
    case ScalingHypothesis::none:
      return 1.0;
  }
  return 1.0;
}

MultSolverPlan::MultSolverPlan(PhysicalParams params, KernelSpec kernel,
                               ScalingHypothesis hypothesis)
    : params_(params),
      kernel_(std::move(kernel)),
      hypothesis_(hypothesis),
      n_(kernel_.factor_count_convention == FactorCountConvention::factors ? params.p() + 1
                                                                           : params.p()) {}

double MultSolverPlan::alpha() const {
  return params_.p() * (n_ - 1.0) / (2.0 * n_);
}

double MultSolverPlan::lower_limit() const {
  return alpha() < 1.0 ? 0.0 : kMultMinTime;
}

double MultSolverPlan::substitution_power() const {
  return alpha() < 1.0 ? 1.0 / (1.0 - alpha()) : 1.0;
}

double MultH::value() const {
  return sign * std::exp(log_abs);
}

MultH h_mult_quadrature(double s, double t, const MultSolverPlan& plan) {
  return compute_h(s, t, plan, true);
}

double h_mult_corollary(double s, double t, const MultSolverPlan& plan, SelfConvSource source,
                        const SpectralGrid& grid) {
  require_min_time(t);
  const auto& pp = plan.params();
  const int p = pp.p();
  if (pp.eps() == 0.0) return 0.0;
  const int i = p - 2;
  const double b = pp.b();
  const auto S = [&](double tau) {
    return iterated_gauss_selfconv(s, tau, pp.D(), i, source, grid) * std::exp(-b * tau);
  };
  double integral;
  const double tol = plan.kernel().quad_rel_tol;
  if (p == 2) {
    // tau^(-1/2) endpoint: tau = sigma^2.
    integral = integrate([&](double sigma) { return 2.0 * sigma * S(sigma * sigma); }, 0.0,
                         std::sqrt(t), tol)
                   .value;
  } else {
    integral = integrate(S, kMultMinTime, t, tol).value;
  }
  return pp.eps() * (1.0 - p) * std::exp(b * t) * integral;
}

MultSolution solve_mult(double t, const MultSolverPlan& plan, const TransformPlan& transform) {
  require_min_time(t);
  const auto& grid = transform.spectral();
  const auto& pp = plan.params();
  const std::size_t n = grid.size();
  const int root = plan.n();
  std::vector<double> signs(n), values(n);
  std::vector<bool> branch(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = grid.s(i);
    const auto h = compute_h(s, t, plan, false);
    const double log_rooted = 0.5 * std::log(static_cast<double>(root)) -
                              spatial_rate(s, pp.D()) * root * t +
                              (root - 1.0) / (2.0 * root) * std::log(4.0 * kPi * pp.D() * t);
    const auto v = power_of_h(h.sign, h.log_abs, log_rooted, plan.m(), pp.p());
    signs[i] = h.sign;
    branch[i] = !v.has_value();
    values[i] = v.value_or(std::numeric_limits<double>::quiet_NaN());
  }
  return assemble_mult(transform, t, signs, values, branch);
}

MultSolution solve_mult_corollary(double t, const MultSolverPlan& plan,
                                  const TransformPlan& transform, SelfConvSource source) {
  require_min_time(t);
  const auto& grid = transform.spectral();
  const auto& pp = plan.params();
  const std::size_t n = grid.size();
  std::vector<double> signs(n), values(n);
  std::vector<bool> branch(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = grid.s(i);
    const double h = plan.kernel().C(s) * std::exp((pp.p() - 1.0) * pp.b() * t) +
                     h_mult_corollary(s, t, plan, source, grid);
    const double log_g = -spatial_rate(s, pp.D()) * t;
    const auto v = power_of_h(h < 0.0 ? -1.0 : 1.0, std::log(std::abs(h)), log_g, plan.m(), pp.p());
    signs[i] = h < 0.0 ? -1.0 : 1.0;
    branch[i] = !v.has_value();
    values[i] = v.value_or(std::numeric_limits<double>::quiet_NaN());
  }
  return assemble_mult(transform, t, signs, values, branch);
}

PdeResidual pde_residual_physical(const std::vector<std::vector<double>>& u_family, double dt,
                                  const PhysicalParams& params, ScalingHypothesis hypothesis,
                                  int root_order, const TransformPlan& transform,
                                  PhysicalNonlinearity nonlinearity) {
  if (u_family.size() < 5) throw InvalidArgument("PDE residual needs at least 5 time samples");
  if (!(dt > 0.0)) throw InvalidArgument("PDE residual needs dt > 0");
  const auto& x = transform.spatial();
  const std::size_t n = x.size();
  for (const auto& u : u_family) {
    if (u.size() != n) throw InvalidArgument("family sample count does not match the grid");
  }
  const std::size_t c = u_family.size() / 2;
  if (c < 2 || c + 2 >= u_family.size()) throw InvalidArgument("PDE residual stencil out of range");
  const auto& u = u_family[c];
  const double f = hypothesis_factor(hypothesis, root_order);
  const double D = f * params.D();
  const double b = f * params.b();
  const double eps = f * params.eps();
  const int p = params.p();

  const auto uxx = spectral_second_derivative(transform, std::span<const double>(u));
  std::vector<double> N(n);
  if (nonlinearity == PhysicalNonlinearity::multiplicative) {
    for (std::size_t j = 0; j < n; ++j) N[j] = std::pow(u[j], p);
  } else {
    std::vector<std::vector<double>> copies(static_cast<std::size_t>(p), u);
    N = circular_convolve_all(copies, x.dx());
  }

  const std::size_t edge = n / 10;
  PdeResidual r;
  for (std::size_t j = edge; j + edge < n; ++j) {
    const double ut = five_point(u_family[c - 2][j], u_family[c - 1][j], u_family[c + 1][j],
                                 u_family[c + 2][j], dt);
    const double diff = D * uxx[j];
    const double decay = b * u[j];
    const double react = eps * N[j];
    r.absolute = std::max(r.absolute, std::abs(ut - diff + decay - react));
    r.scale = std::max({r.scale, std::abs(ut), std::abs(diff), std::abs(decay), std::abs(react)});
  }
  return r;
}

FisherConstantProb fisher_constant_prob(double x, double t, double D, double eps,
                                        double prob_product) {
  if (!(prob_product > 0.0 && prob_product <= 1.0)) {
    throw InvalidArgument("probability product must lie in (0, 1]");
  }
  return {heat_kernel(x, t, D) * std::exp(eps * prob_product * t), eps * prob_product > 0.0};
}

SpectralField fisher_quadratic(double t, const PhysicalParams& params, const SpectralGrid& grid,
                               std::span<const std::function<double(double)>> spectra,
                               double prob_product, double quad_rel_tol) {
  if (params.p() != 2) throw InvalidArgument("quadratic Fisher form needs p = 2");
  if (!(t > 0.0)) throw InvalidArgument("quadratic Fisher form needs t > 0");
  const std::size_t n = grid.size();
  const double D = params.D();

  std::vector<double> K;
  if (!spectra.empty()) {
    std::vector<std::vector<double>> sampled;
    for (const auto& f : spectra) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = f(grid.s(i));
        if (!std::isfinite(v[i])) throw InvalidArgument("probability spectrum is not finite");
      }
      sampled.push_back(std::move(v));
    }
    K = sampled.size() == 1 ? sampled.front() : circular_convolve_all(sampled, grid.ds());
  }

  std::vector<Complex> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = grid.s(i);
    std::function<double(double)> W;
    if (K.empty()) {
      W = [&](double tau) { return prob_product * gauss_codomain(s, tau, D); };
    } else {
      W = [&](double tau) {
        double acc = 0.0;
        for (std::size_t m = 0; m < n; ++m) acc += K[m] * gauss_codomain(s - grid.s(m), tau, D);
        return prob_product * acc * grid.ds();
      };
    }
    const double integral = params.eps() == 0.0 ? 0.0 : integrate(W, 0.0, t, quad_rel_tol).value;
    values[i] = gauss_codomain(s, t, D) * std::exp(-params.eps() * integral);
  }
  return SpectralField(grid, t, std::move(values));
}

}  // namespace nws
