#include "nws/conv_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nws/errors.hpp"
#include "nws/greens.hpp"
#include "nws/quadrature.hpp"

namespace nws {

namespace {

constexpr double kPi = std::numbers::pi;

double kappa_of(double s, const PhysicalParams& params) {
  const double w = 2.0 * kPi * s;
  return params.D() * w * w + params.b();
}

// (1 - exp(-(p-1) kappa t)) / kappa for any real t, with the kappa -> 0 limit.
double decay_integral(double kappa, double t, int p) {
  const double q = static_cast<double>(p - 1);
  const double x = q * kappa * t;
  if (std::abs(kappa) * std::abs(t) < 1e-8) {
    return q * t * (1.0 - x / 2.0 + x * x / 6.0);
  }
  return -std::expm1(-x) / kappa;
}

// h_spec at any signed time; negative times are needed by the forcing integral.
double h_any_time(double s, double t, const PhysicalParams& params, double C) {
  if (params.eps() == 0.0) return C;
  return C - params.eps() * decay_integral(kappa_of(s, params), t, params.p());
}

std::optional<double> formula_root(double kappa, double eps, double C, int p) {
  if (kappa == 0.0 || eps == C * kappa) return std::nullopt;
  const double ratio = eps / (eps - C * kappa);
  if (!(ratio > 0.0) || !std::isfinite(ratio)) return std::nullopt;
  const double t0 = std::log(ratio) / (static_cast<double>(p - 1) * kappa);
  if (!(t0 > 0.0) || !std::isfinite(t0)) return std::nullopt;
  return t0;
}

void guard_fd_step(const ConvSolution& solution, double s, double t, double dt) {
  if (!(t > 0.0)) throw InvalidArgument("residual needs t > 0");
  if (!(dt > 0.0) || dt > 1e-3 * t * (1.0 + 1e-12)) {
    throw InvalidArgument("residual step must satisfy 0 < dt <= 1e-3 t");
  }
  const auto& pp = solution.params();
  if (const auto t0 = formula_root(kappa_of(s, pp), pp.eps(), solution.kernel().C(s), pp.p())) {
    if (std::abs(t - *t0) < 10.0 * dt) {
      std::ostringstream msg;
      msg << "residual requested within 10 dt of the root t0 = " << *t0;
      throw PoleError(msg.str());
    }
  }
}

double value_or_throw(const CodomainValue& v) {
  if (v.branch_failure || !std::isfinite(v.value)) {
    throw PoleError("residual stencil touches a pole or branch failure");
  }
  return v.value;
}

}  // namespace

double h_specific(double s, double t, const PhysicalParams& params, const KernelSpec& kernel) {
  if (!(t >= 0.0)) throw InvalidArgument("h_specific needs t >= 0");
  const double C = kernel.C(s);
  if (!std::isfinite(C)) throw InvalidArgument("C(s) is not finite");
  return h_any_time(s, t, params, C);
}

ConvSolution::ConvSolution(PhysicalParams params, KernelSpec kernel)
    : params_(params),
      kernel_(std::move(kernel)),
      exponent_(-1.0 / static_cast<double>(params.p() - 1)) {}

CodomainValue ConvSolution::assemble(double s, double h_value, double scale) const {
  const double C = kernel_.C(s);
  const double ref = C != 0.0 ? std::abs(C) : 1.0;
  const bool crossed = C != 0.0 && std::signbit(h_value) != std::signbit(C);
  const bool near = std::abs(h_value) <= kernel_.pole_tol * ref;
  const bool even_root = (params_.p() - 1) % 2 == 0;

  CodomainValue out;
  out.pole = crossed || near;
  out.branch_failure = h_value < 0.0 && even_root;

  if (kernel_.pole_policy == PolePolicy::error) {
    std::ostringstream where;
    where << " at s = " << s << " (h = " << h_value << ")";
    if (out.branch_failure) {
      throw BranchError("negative h with an even root order has no real branch" + where.str());
    }
    if (out.pole) throw PoleError("solution evaluated at or beyond a root of h" + where.str());
  }

  double h = h_value;
  if (kernel_.pole_policy == PolePolicy::clamp && (out.pole || out.branch_failure)) {
    h = std::copysign(kernel_.pole_tol * ref, C != 0.0 ? C : 1.0);
    if (h < 0.0 && even_root) h = -h;
    out.branch_failure = false;
  }

  if (out.branch_failure) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double power;
  if (params_.p() == 2) {
    power = 1.0 / h;
  } else if (h < 0.0) {
    power = -std::pow(-h, exponent_);
  } else {
    power = std::pow(h, exponent_);
  }
  out.value = scale * power;
  return out;
}

CodomainValue ConvSolution::F(double s, double t) const {
  return assemble(s, h(s, t), std::exp(-params_.b() * t));
}

CodomainValue ConvSolution::u(double s, double t) const {
  return assemble(s, h(s, t), gauss_codomain(s, t, params_.D()) * std::exp(-params_.b() * t));
}

CodomainSolution solve_codomain(double t, const ConvSolution& solution, const SpectralGrid& grid) {
  if (!(t >= 0.0)) throw InvalidArgument("solve_codomain needs t >= 0");
  std::vector<Complex> values(grid.size());
  std::vector<std::size_t> poles;
  std::vector<std::size_t> branches;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto v = solution.u(grid.s(i), t);
    values[i] = v.value;
    if (v.pole) poles.push_back(i);
    if (v.branch_failure) branches.push_back(i);
  }
  return {SpectralField(grid, t, std::move(values)), std::move(poles), std::move(branches)};
}

PhysicalSolution solve_physical(double t, const ConvSolution& solution, const TransformPlan& plan,
                                double aliasing_floor) {
  if (!(t > 0.0)) {
    throw InvalidArgument("physical solution at t = 0 is a distributional limit");
  }
  const auto cs = solve_codomain(t, solution, plan.spectral());
  PhysicalSolution out;
  if (!cs.clean()) {
    out.pole = true;
    out.u.assign(plan.spatial().size(), std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  const double peak = max_abs(cs.u.values());
  const double nyq = std::abs(cs.u[0]);
  if (peak > 0.0 && nyq > aliasing_floor * peak) {
    std::ostringstream msg;
    msg << "grid too coarse for t = " << t << ": |u(s_max)|/max|u| = " << nyq / peak
        << " exceeds " << aliasing_floor;
    throw AliasingError(msg.str());
  }
  auto inv = plan.inverse_checked(cs.u);
  out.u = std::move(inv.values);
  out.imag_residue = inv.imag_residue;
  return out;
}

ResidualValue bernoulli_residual(const ConvSolution& solution, double s, double t, double dt) {
  guard_fd_step(solution, s, t, dt);
  const auto& pp = solution.params();
  double Fv[5];
  for (int k = 0; k < 5; ++k) Fv[k] = value_or_throw(solution.F(s, t + (k - 2) * dt));
  const double dF = five_point(Fv[0], Fv[1], Fv[3], Fv[4], dt);
  const double g = gauss_codomain(s, t, pp.D());
  const double F = Fv[2];
  const double t1 = dF * g;
  const double t2 = pp.b() * F * g;
  const double t3 = pp.eps() * std::pow(F * g, pp.p());
  return {std::abs(t1 + t2 - t3), std::max({std::abs(t1), std::abs(t2), std::abs(t3)})};
}

ResidualValue codomain_ode_residual(const ConvSolution& solution, double s, double t, double dt) {
  guard_fd_step(solution, s, t, dt);
  const auto& pp = solution.params();
  double uv[5];
  for (int k = 0; k < 5; ++k) uv[k] = value_or_throw(solution.u(s, t + (k - 2) * dt));
  const double du = five_point(uv[0], uv[1], uv[3], uv[4], dt);
  const double t2 = kappa_of(s, pp) * uv[2];
  const double t3 = pp.eps() * std::pow(uv[2], pp.p());
  return {std::abs(du + t2 - t3), std::max({std::abs(du), std::abs(t2), std::abs(t3)})};
}

std::string_view to_string(RootRegime r) {
  switch (r) {
    case RootRegime::no_root:
      return "no_root";
    case RootRegime::root_at:
      return "root_at";
    case RootRegime::asymptotic_infinity:
      return "asymptotic_infinity";
  }
  return "unknown";
}

RootReport root_locus(const PhysicalParams& params, const KernelSpec& kernel, double s,
                      double t_max) {
  const double kappa = kappa_of(s, params);
  if (kappa == 0.0) throw InvalidArgument("root formula undefined: b (p-1) = 0 at this frequency");
  RootReport r;
  r.s = s;
  r.C = kernel.C(s);
  r.eps = params.eps();
  r.b = params.b();
  r.p = params.p();

  if (params.eps() == r.C * kappa) {
    r.regime = RootRegime::asymptotic_infinity;
    return r;
  }
  r.formula_t0 = formula_root(kappa, params.eps(), r.C, params.p());

  // h is monotone in t, so one sign check at t_max decides whether to bisect.
  const double sign = r.C < 0.0 ? -1.0 : 1.0;
  auto positive = [&](double t) { return sign * h_any_time(s, t, params, r.C) > 0.0; };
  if (r.C != 0.0 && !positive(t_max)) {
    double lo = 0.0;
    double hi = t_max;
    for (int it = 0; it < 2000 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi;
         ++it) {
      const double mid = 0.5 * (lo + hi);
      (positive(mid) ? lo : hi) = mid;
    }
    r.bisection_t0 = 0.5 * (lo + hi);
  }

  r.t0 = r.formula_t0 ? r.formula_t0 : r.bisection_t0;
  r.regime = r.t0 ? RootRegime::root_at : RootRegime::no_root;
  if (r.formula_t0 && r.bisection_t0) r.difference = std::abs(*r.formula_t0 - *r.bisection_t0);
  return r;
}

std::vector<double> large_p_limit(const PhysicalParams& base, std::span<const int> orders, double t,
                                  const SpectralGrid& grid) {
  if (std::abs(base.eps()) > 1.0) throw InvalidArgument("large_p_limit needs |eps| <= 1");
  std::vector<double> out;
  out.reserve(orders.size());
  for (int p : orders) {
    const ConvSolution sol(make_params(base.D(), base.b(), base.eps(), p));
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = grid.s(i);
      const auto v = sol.assemble(s, sol.h(s, t), 1.0);
      if (v.pole || v.branch_failure) continue;
      sup = std::max(sup, std::abs(v.value - 1.0));
    }
    out.push_back(sup);
  }
  return out;
}

SpectralField solve_forced(double t, const ConvSolution& solution, const SpectralGrid& grid,
                           const Forcing& forcing) {
  if (!(t >= 0.0)) throw InvalidArgument("solve_forced needs t >= 0");
  const auto& pp = solution.params();
  const double m = solution.exponent();
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid.s(i);
    const double C = solution.kernel().C(s);
    const double kappa = kappa_of(s, pp);
    const auto homogeneous = solution.assemble(s, solution.h(s, t), 1.0);
    if (homogeneous.pole || homogeneous.branch_failure) {
      values[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    Complex particular = 0.0;
    if (forcing.k && t > 0.0) {
      const auto integrand = [&](double tau) -> Complex {
        const Complex kv = forcing.k(s, tau);
        if (kv == Complex(0.0)) return 0.0;
        const double hb = h_any_time(s, -tau, pp, C);
        if (!(hb > 0.0)) {
          throw QuadratureError("forcing integrand meets a root of h(s,-tau)");
        }
        const double w = std::isinf(hb) ? 0.0 : std::pow(hb, m);
        return kv * std::exp(-kappa * (t - tau)) * w;
      };
      particular = integrate_complex(integrand, 0.0, t, forcing.breakpoints,
                                     solution.kernel().quad_rel_tol);
    }
    const Complex B = forcing.B ? forcing.B(s) : Complex(0.0);
    const double g_decay = gauss_codomain(s, t, pp.D()) * std::exp(-pp.b() * t);
    values[i] = homogeneous.value * (particular + B * g_decay);
  }
  return SpectralField(grid, t, std::move(values));
}

CodomainSolution solve_with_kernels(double t, const ConvSolution& solution,
                                    const SpectralGrid& grid,
                                    std::span<const std::function<double(double)>> kernels,
                                    KernelMode mode) {
  if (kernels.empty()) return solve_codomain(t, solution, grid);
  if (!(t >= 0.0)) throw InvalidArgument("solve_with_kernels needs t >= 0");
  const auto& pp = solution.params();
  const std::size_t n = grid.size();
  const int p = pp.p();

  std::vector<double> khat(n);
  if (mode == KernelMode::product_K1) {
    std::vector<std::vector<double>> sampled;
    for (const auto& k : kernels) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = k(grid.s(i));
      sampled.push_back(std::move(v));
    }
    khat = sampled.size() == 1 ? sampled.front()
                               : circular_convolve_all(sampled, grid.ds());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double prod = 1.0;
      for (const auto& k : kernels) prod *= k(grid.s(i));
      khat[i] = prod;
    }
  }
  for (double v : khat) {
    if (!std::isfinite(v)) throw InvalidArgument("kernel profile is not finite on the grid");
  }

  const double power = mode == KernelMode::product_K1 ? static_cast<double>(p - 1)
                                                      : static_cast<double>(kernels.size());
  std::vector<Complex> values(n);
  std::vector<std::size_t> poles;
  std::vector<std::size_t> branches;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = grid.s(i);
    const double kappa = kappa_of(s, pp);
    const double weight = std::pow(khat[i], power);
    double integral = 0.0;
    if (pp.eps() != 0.0 && weight != 0.0 && t > 0.0) {
      integral = integrate([&](double tau) { return std::exp(-(p - 1) * kappa * tau); }, 0.0, t,
                           solution.kernel().quad_rel_tol)
                     .value;
    }
    const double h = solution.kernel().C(s) - pp.eps() * (p - 1) * weight * integral;
    double scale = gauss_codomain(s, t, pp.D()) * std::exp(-pp.b() * t);
    if (mode == KernelMode::product_K1) scale *= khat[i];
    const auto v = solution.assemble(s, h, scale);
    values[i] = v.value;
    if (v.pole) poles.push_back(i);
    if (v.branch_failure) branches.push_back(i);
  }
  return {SpectralField(grid, t, std::move(values)), std::move(poles), std::move(branches)};
}

namespace {

void require_fisher(double t, const PhysicalParams& params) {
  if (params.p() != 2) throw InvalidArgument("Fisher erfc form needs p = 2");
  if (std::abs(params.eps()) > 0.1) throw InvalidArgument("Fisher erfc form needs |eps| <= 0.1");
  if (!(t > 0.0)) throw InvalidArgument("Fisher erfc form needs t > 0");
  if (!(params.b() > 0.0)) throw InvalidArgument("Fisher erfc form needs b > 0");
}

}  // namespace

double fisher_erfc_approx(double x, double t, const PhysicalParams& params) {
  require_fisher(t, params);
  const double D = params.D();
  const double b = params.b();
  const double eps = params.eps();
  const double linear = heat_kernel(x, t, D) * std::exp(-b * t);

  const double r1 = std::sqrt(b / D);
  const double c1 = 2.0 * std::sqrt(D * b) * t;
  const double w1 = 2.0 * std::sqrt(D * t);
  const double first = exp_times_erfc(-x * r1, (c1 - x) / w1) + exp_times_erfc(x * r1, (c1 + x) / w1);

  const double r2 = std::sqrt(b / (2.0 * D));
  const double c2 = 2.0 * std::sqrt(2.0 * D * b) * t;
  const double w2 = 2.0 * std::sqrt(2.0 * D * t);
  const double second =
      exp_times_erfc(-x * r2, (c2 - x) / w2) + exp_times_erfc(x * r2, (c2 + x) / w2);

  return linear + eps * first / (4.0 * std::sqrt(D * b)) -
         eps * std::exp(-b * t) * second / (4.0 * std::sqrt(2.0 * D * b));
}

double fisher_erfc_corrected(double x, double t, const PhysicalParams& params) {
  require_fisher(t, params);
  const double D = params.D();
  const double b = params.b();
  const double eps = params.eps();
  return heat_kernel(x, t, D) * std::exp(-b * t) +
         eps * std::exp(-b * t) * erfc_pair(x, t, D, b) -
         eps * std::exp(-2.0 * b * t) * erfc_pair(x, 2.0 * t, D, b);
}

}  // namespace nws
