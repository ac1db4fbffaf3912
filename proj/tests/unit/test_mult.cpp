#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nws/conv_solver.hpp"
#include "nws/errors.hpp"
#include "nws/mult_solver.hpp"

using namespace nws;

namespace {

constexpr double kPi = std::numbers::pi;

// \int_0^t e^{c tau} tau^{-a} dtau by its power series.
double gamma_series(double c, double a, double t) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) term *= c * t / k;
    sum += term / (k + 1.0 - a);
  }
  return sum * std::pow(t, 1.0 - a);
}

double rk4_linear(const std::function<double(double)>& rate, double t_end, int steps) {
  const double h = t_end / steps;
  double u = 1.0;
  double t = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double k1 = rate(t) * u;
    const double k2 = rate(t + h / 2) * (u + h / 2 * k1);
    const double k3 = rate(t + h / 2) * (u + h / 2 * k2);
    const double k4 = rate(t + h) * (u + h * k3);
    u += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
    t += h;
  }
  return u;
}

double sup(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end());
}

}  // namespace

TEST_CASE("plan bookkeeping") {
  for (int p = 2; p <= 8; ++p) {
    const MultSolverPlan plan(make_params(1, 1, 0.01, p));
    CHECK(plan.m() * (p - 1) + 1.0 == 0.0);
    CHECK(plan.n() == p + 1);
    const double e = plan.rooted().exponent();
    CHECK(e > -0.5);
    CHECK(e < 0.0);
    CHECK(plan.alpha() == doctest::Approx(p * p / (2.0 * (p + 1))));
  }
  const MultSolverPlan p2(make_params(1, 1, 0.01, 2));
  CHECK(p2.alpha() == doctest::Approx(2.0 / 3.0));
  CHECK(p2.lower_limit() == 0.0);
  CHECK(p2.substitution_power() == doctest::Approx(3.0));
  // alpha >= 1 from p = 3 on: not integrable at zero.
  CHECK(MultSolverPlan(make_params(1, 1, 0.01, 3)).lower_limit() == kMultMinTime);

  KernelSpec ops;
  ops.factor_count_convention = FactorCountConvention::operators;
  CHECK(MultSolverPlan(make_params(1, 1, 0.01, 3), ops).n() == 3);

  CHECK(hypothesis_factor(ScalingHypothesis::sqrt_np1, 3) == doctest::Approx(std::sqrt(3.0)));
  CHECK(hypothesis_factor(ScalingHypothesis::times_np1, 3) == 3.0);
  CHECK(hypothesis_factor(ScalingHypothesis::none, 3) == 1.0);
  for (auto h : {ScalingHypothesis::sqrt_np1, ScalingHypothesis::times_np1, ScalingHypothesis::none}) {
    CHECK(scaling_hypothesis_from_string(to_string(h)) == h);
  }
  CHECK_THROWS_AS(scaling_hypothesis_from_string("double"), InvalidArgument);
}

TEST_CASE("h_mult_quadrature") {
  SUBCASE("eps = 0 leaves the prefactor family") {
    for (int p : {2, 3, 5}) {
      const MultSolverPlan plan(make_params(1, 0.5, 0.0, p));
      for (double t : {0.1, 1.0}) {
        const double expect =
            std::exp(-(1.0 - p * p) * 0.5 * t) * std::pow(t, (p * p - p) / (2.0 * p + 2.0));
        CHECK(h_mult_quadrature(0.3, t, plan).value() == doctest::Approx(expect).epsilon(1e-13));
      }
    }
  }
  SUBCASE("p = 2, C = 0 against the power series") {
    KernelSpec k;
    k.C = IntegrationConstant::constant(0.0);
    const auto pp = make_params(1, 1, 0.01, 2);
    const MultSolverPlan plan(pp, k);
    for (double s : {0.0, 0.05, 0.2}) {
      for (double t : {0.1, 1.0}) {
        const double c = -3.0 + 2.0 * std::pow(2 * kPi * s, 2);
        const double K = -0.01 * std::sqrt(3.0) * std::pow(4 * kPi, -1.0 / 3.0);
        const double expect = std::exp(3.0 * t) * std::cbrt(t) * K * gamma_series(c, 2.0 / 3.0, t);
        const auto h = h_mult_quadrature(s, t, plan);
        CHECK(h.value() == doctest::Approx(expect).epsilon(1e-9));
        CHECK(h.certificate.honored);
      }
    }
    const auto h = h_mult_quadrature(0.0, 1.0, plan);
    CHECK(h.certificate.change <= 1e-9 * std::abs(h.certificate.value));
  }
  SUBCASE("self-convergence at random probes") {
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> s_dist(0.0, 1.5);
    std::uniform_real_distribution<double> t_dist(0.05, 2.0);
    for (int p : {2, 3}) {
      const MultSolverPlan plan(make_params(1, 1, 0.01, p));
      for (int k = 0; k < 20; ++k) {
        const auto h = h_mult_quadrature(s_dist(rng), t_dist(rng), plan);
        CHECK(h.certificate.honored);
        CHECK(std::isfinite(h.log_abs));
      }
    }
  }
  SUBCASE("large exponents stay in log form") {
    const MultSolverPlan plan(make_params(1, 1, 0.01, 2));
    const auto h = h_mult_quadrature(3.0, 2.0, plan);
    CHECK(std::isfinite(h.log_abs));
    CHECK(h.log_abs > 700.0);
    CHECK(h.sign < 0.0);
  }
  CHECK_THROWS_AS(h_mult_quadrature(0.0, 0.005, MultSolverPlan(make_params(1, 1, 0.01, 2))),
                  InvalidArgument);
}

TEST_CASE("corollary integrand sources") {
  const auto [x, s] = make_grids(256, 20.0);
  const auto pp = make_params(1, 1, 0.1, 2);
  const MultSolverPlan plan(pp);
  CHECK(h_mult_corollary(0.2, 1.0, MultSolverPlan(pp.with_eps(0.0)), SelfConvSource::closed_form,
                         s) == 0.0);

  std::vector<double> ratios;
  for (double v : {0.0, 0.1, 0.3}) {
    const double t = 1.0;
    const double kappa = std::pow(2 * kPi * v, 2) + 1.0;
    const double printed = -0.1 * std::exp(t) * std::erf(std::sqrt(kappa * t)) *
                           std::sqrt(kPi / kappa) / std::sqrt(4 * kPi);
    const double discrete = -0.1 * std::exp(t) * (1.0 - std::exp(-kappa * t)) / kappa;
    const double hp = h_mult_corollary(v, t, plan, SelfConvSource::closed_form, s);
    const double hd = h_mult_corollary(v, t, plan, SelfConvSource::discrete_oracle, s);
    CHECK(hp == doctest::Approx(printed).epsilon(1e-9));
    CHECK(hd == doctest::Approx(discrete).epsilon(1e-9));
    ratios.push_back(hp / hd);
  }
  MESSAGE("printed/discrete corollary ratio at s = 0, 0.1, 0.3: " << ratios[0] << ", " << ratios[1]
                                                                  << ", " << ratios[2]);
  CHECK(std::abs(ratios[2] / ratios[0] - 1.0) > 1e-3);

  // With C added back, h grows with t and h^m decays.
  for (int p : {2, 3, 4, 6}) {
    const MultSolverPlan q(make_params(1, 1, 0.01, p));
    double previous = 1e300;
    for (double t : {1.0, 5.0, 10.0}) {
      const double h = std::exp((p - 1.0) * t) +
                       h_mult_corollary(0.0, t, q, SelfConvSource::discrete_oracle, s);
      REQUIRE(h > 0.0);
      const double v = std::pow(h, q.m());
      CHECK(v < previous);
      previous = v;
    }
    CHECK(previous < 1e-3);
  }
}

TEST_CASE("solve_mult") {
  const auto grids = default_grids();
  const TransformPlan transform(grids);
  const auto& x = grids.first;
  const MultSolverPlan plan(make_params(1, 1, 0.01, 2));
  const auto sol = solve_mult(0.5, plan, transform);
  CHECK(sol.imag_residue < 1e-8);
  CHECK(sol.branch_failures.empty());
  for (std::size_t j = 1; j < x.size(); ++j) {
    CHECK(std::abs(sol.u[j] - sol.u[x.size() - j]) <= 1e-12 * sup(sol.u));
  }
  for (double v : sol.u) CHECK(std::isfinite(v));

  // eps = 0: g' h^m = g'(s,t) e^{-3bt} t^{-1/3} with C = 1, an explicit Gaussian.
  const MultSolverPlan lin(make_params(1, 1, 0.0, 2));
  const auto u0 = solve_mult(0.5, lin, transform);
  for (std::size_t j = 0; j < x.size(); j += 7) {
    const double t = 0.5;
    const double expect = std::sqrt(3.0) * std::pow(4 * kPi * t, 1.0 / 3.0) *
                          std::exp(-3.0 * t) * std::pow(t, -1.0 / 3.0) * heat_kernel(x.x(j), 3 * t, 1.0);
    CHECK(std::abs(u0.u[j] - expect) < 1e-10);
  }

  const MultSolverPlan dissipative(make_params(1, 1, -0.01, 2));
  double previous = 1e300;
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const double m = sup(solve_mult(t, dissipative, transform).u);
    CHECK(m < previous);
    previous = m;
  }

  // Growth drives h through zero at moderate frequency; everything beyond is cut.
  REQUIRE_FALSE(sol.flagged.empty());
  const auto& s_grid = grids.second;
  double s_cut = 1e300;
  for (std::size_t i : sol.flagged) s_cut = std::min(s_cut, std::abs(s_grid.s(i)));
  CHECK(s_cut > 0.1);
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const bool beyond = std::abs(s_grid.s(i)) >= s_cut;
    CHECK(beyond == (std::find(sol.flagged.begin(), sol.flagged.end(), i) != sol.flagged.end()));
  }
  CHECK(h_mult_quadrature(0.0, 0.5, plan).sign > 0.0);
  CHECK(h_mult_quadrature(s_cut, 0.5, plan).sign < 0.0);

  // h < 0 at every frequency: odd root order continues to negative u, nothing is cut.
  const auto strong = solve_mult(1.0, MultSolverPlan(make_params(1, 1, 5.0, 2)), transform);
  CHECK(strong.flagged.empty());
  CHECK(strong.u[x.size() / 2] < 0.0);

  CHECK_THROWS_AS(solve_mult(0.001, plan, transform), InvalidArgument);

  const auto cor = solve_mult_corollary(0.5, plan, transform, SelfConvSource::discrete_oracle);
  for (double v : cor.u) CHECK(std::isfinite(v));
}

TEST_CASE("PDE residual machinery") {
  const auto grids = default_grids();
  const TransformPlan transform(grids);
  const auto pp = make_params(1, 1, 0.1, 2);

  const std::vector<std::vector<double>> zeros(5, std::vector<double>(grids.first.size(), 0.0));
  CHECK(pde_residual_physical(zeros, 1e-3, pp, ScalingHypothesis::none, 3, transform,
                              PhysicalNonlinearity::multiplicative)
            .absolute == 0.0);
  CHECK_THROWS_AS(pde_residual_physical(std::vector<std::vector<double>>(4, zeros[0]), 1e-3, pp,
                                        ScalingHypothesis::none, 3, transform,
                                        PhysicalNonlinearity::multiplicative),
                  InvalidArgument);

  // Calibration: the convolution solution satisfies its own equation.
  const ConvSolution conv(pp);
  const double dt = 1e-3;
  std::vector<std::vector<double>> family;
  for (int k = -2; k <= 2; ++k) family.push_back(solve_physical(0.5 + k * dt, conv, transform).u);
  const auto r = pde_residual_physical(family, dt, pp, ScalingHypothesis::none, 1, transform,
                                       PhysicalNonlinearity::convolution);
  CHECK(r.relative() < 1e-5);
  // The same family does not satisfy the multiplicative equation.
  CHECK(pde_residual_physical(family, dt, pp, ScalingHypothesis::none, 1, transform,
                              PhysicalNonlinearity::multiplicative)
            .relative() > 1e-4);

  // Hypothesis table for the multiplicative family is finite and reproducible.
  const auto mp = make_params(1, 1, 0.01, 2);
  const MultSolverPlan plan(mp);
  std::vector<std::vector<double>> mult_family;
  for (int k = -2; k <= 2; ++k) mult_family.push_back(solve_mult(0.5 + k * dt, plan, transform).u);
  for (auto h : {ScalingHypothesis::sqrt_np1, ScalingHypothesis::times_np1, ScalingHypothesis::none}) {
    const auto a = pde_residual_physical(mult_family, dt, mp, h, plan.n(), transform,
                                         PhysicalNonlinearity::multiplicative);
    const auto b = pde_residual_physical(mult_family, dt, mp, h, plan.n(), transform,
                                         PhysicalNonlinearity::multiplicative);
    CHECK(std::isfinite(a.relative()));
    CHECK(a.absolute == b.absolute);
    MESSAGE(to_string(h) << " relative residual " << a.relative());
  }
}

TEST_CASE("Fisher variants") {
  CHECK(fisher_constant_prob(0.4, 0.7, 1.0, 0.0, 0.5).value ==
        doctest::Approx(heat_kernel(0.4, 0.7, 1.0)).epsilon(1e-15));
  const auto f = fisher_constant_prob(0.0, 1.0, 1.0, 1.0, 0.25);
  CHECK(f.value == doctest::Approx(std::exp(0.25) / std::sqrt(4 * kPi)).epsilon(1e-15));
  CHECK(f.value == doctest::Approx(0.36220).epsilon(1e-4));
  CHECK(f.grows);
  CHECK_FALSE(fisher_constant_prob(0.0, 1.0, 1.0, -1.0, 0.25).grows);
  CHECK_THROWS_AS(fisher_constant_prob(0.0, 1.0, 1.0, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(fisher_constant_prob(0.0, 1.0, 1.0, 1.0, 1.5), InvalidArgument);

  const auto [x, s] = make_grids(128, 20.0);
  const std::vector<std::function<double(double)>> none;
  const auto pure = fisher_quadratic(0.5, make_params(1, 1, 0.0, 2), s, none);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(pure[i].real() == doctest::Approx(gauss_codomain(s.s(i), 0.5, 1.0)).epsilon(1e-15));
  }

  // Per-frequency ODE u' = -(D w^2 + eps P g) u from u = 1.
  for (double eps : {0.3, -0.3}) {
    const double P = 0.4;
    const auto field = fisher_quadratic(0.8, make_params(1, 1, eps, 2), s, none, P);
    for (double v : {0.0, 0.1, 0.25}) {
      const double a = std::pow(2 * kPi * v, 2);
      const double ref =
          rk4_linear([&](double t) { return -a - eps * P * std::exp(-a * t); }, 0.8, 4000);
      const std::size_t i = s.zero_index() + static_cast<std::size_t>(std::lround(v / s.ds()));
      CHECK(std::abs(field[i].real() - ref) < 1e-6 * std::max(ref, 1e-3));
    }
  }

  // A unit spectrum only rescales W by its grid mass.
  const std::vector<std::function<double(double)>> flat{[](double v) { return v == 0.0 ? 1.0 : 0.0; }};
  const auto delta = fisher_quadratic(0.5, make_params(1, 1, 0.2, 2), s, flat);
  const auto direct = fisher_quadratic(0.5, make_params(1, 1, 0.2 * s.ds(), 2), s, none);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(delta[i].real() == doctest::Approx(direct[i].real()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(fisher_quadratic(0.5, make_params(1, 1, 0.2, 3), s, none), InvalidArgument);
}
