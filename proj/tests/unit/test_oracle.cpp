#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nws/conv_solver.hpp"
#include "nws/errors.hpp"
#include "nws/oracle.hpp"
#include "nws/spectral.hpp"

using namespace nws;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_l2(std::span<const Complex> a, std::span<const Complex> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

OracleConfig conv_config(const PhysicalParams& pp, double dt) {
  return {pp, Nonlinearity::convolution_p, 0.05, 0.5, dt, 1000000, {}, {}};
}

}  // namespace

TEST_CASE("linear runs are exact") {
  const auto [x, s] = make_grids(256, 40.0);
  const TransformPlan plan(x, s);
  const auto pp = make_params(1, 1, 0.0, 2);
  const ConvSolution sol(pp);
  const auto ic = solve_codomain(0.05, sol, s).u;
  const auto traj = step_etd(OracleRun(conv_config(pp, OracleRun::stability_bound(pp, s)), plan, ic));
  CHECK(traj.times.back() == 0.5);
  CHECK(rel_l2(traj.final_state().values(), solve_codomain(0.5, sol, s).u.values()) < 1e-10);

  // b = 0: mass is the s = 0 mode and stays put.
  const auto flat = make_params(1, 0, 0.0, 2);
  OracleConfig cfg = conv_config(flat, OracleRun::stability_bound(flat, s));
  cfg.store_every = 10;
  const auto conserved = step_etd(OracleRun(cfg, plan, solve_codomain(0.05, ConvSolution(flat), s).u));
  const double mass0 = [&] {
    double m = 0.0;
    for (double v : plan.inverse(conserved.states.front())) m += v * x.dx();
    return m;
  }();
  for (const auto& state : conserved.states) {
    double m = 0.0;
    for (double v : plan.inverse(state)) m += v * x.dx();
    CHECK(std::abs(m - mass0) < 1e-10);
  }
}

TEST_CASE("convolution oracle agrees with the closed form at fourth order") {
  const auto [x, s] = make_grids(256, 40.0);
  const TransformPlan plan(x, s);
  const auto pp = make_params(1, 1, 0.1, 2);
  const ConvSolution sol(pp);
  const auto ic = solve_codomain(0.05, sol, s).u;
  const auto exact = solve_codomain(0.5, sol, s).u;
  const double bound = OracleRun::stability_bound(pp, s);
  CHECK(bound == doctest::Approx(0.5 / (std::pow(2 * kPi * 1.6, 2) + 1.0)));

  const double e1 = rel_l2(step_etd(OracleRun(conv_config(pp, bound), plan, ic)).final_state().values(),
                           exact.values());
  const double e2 =
      rel_l2(step_etd(OracleRun(conv_config(pp, bound / 2), plan, ic)).final_state().values(),
             exact.values());
  const double rate = std::log2(e1 / e2);
  MESSAGE("errors " << e1 << " " << e2 << " rate " << rate);
  CHECK(e1 < 1e-3);
  CHECK(rate >= 3.5);
  CHECK(rate <= 4.5);
}

TEST_CASE("multiplicative oracle against physical-space RK4") {
  const auto [x, s] = make_grids(256, 40.0);
  const TransformPlan plan(x, s);
  const auto pp = make_params(1, 0.5, 0.5, 2);

  std::vector<double> u0(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) u0[j] = std::exp(-x.x(j) * x.x(j) / 4.0);
  const auto ic = plan.forward(std::span<const double>(u0), 0.1);
  OracleConfig cfg{pp, Nonlinearity::multiplicative_p, 0.1, 0.6, OracleRun::stability_bound(pp, s) / 2,
                   1000000, {}, {}};
  const auto traj = step_etd(OracleRun(cfg, plan, ic));
  const auto oracle_u = plan.inverse(traj.final_state());

  auto rhs = [&](const std::vector<double>& u) {
    const auto uxx = spectral_second_derivative(plan, std::span<const double>(u));
    std::vector<double> out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = uxx[j] - 0.5 * u[j] + 0.5 * u[j] * u[j];
    return out;
  };
  std::vector<double> u = u0;
  const int steps = 2000;
  const double h = 0.5 / steps;
  auto axpy = [](const std::vector<double>& a, double c, const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] + c * b[j];
    return r;
  };
  for (int k = 0; k < steps; ++k) {
    const auto k1 = rhs(u);
    const auto k2 = rhs(axpy(u, h / 2, k1));
    const auto k3 = rhs(axpy(u, h / 2, k2));
    const auto k4 = rhs(axpy(u, h, k3));
    for (std::size_t j = 0; j < u.size(); ++j) u[j] += h * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]) / 6;
  }
  double err = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) err = std::max(err, std::abs(u[j] - oracle_u[j]));
  CHECK(err < 1e-8);
}

TEST_CASE("oracle configuration checks") {
  const auto [x, s] = make_grids(64, 10.0);
  const TransformPlan plan(x, s);
  const auto pp = make_params(1, 1, 0.1, 2);
  const auto ic = SpectralField::sample(s, 0.0, [](double) { return Complex(1.0); });
  const double bound = OracleRun::stability_bound(pp, s);
  CHECK_THROWS_AS(OracleRun(conv_config(pp, bound * 1.01), plan, ic), InvalidArgument);
  CHECK_THROWS_AS(OracleRun({pp, Nonlinearity::multiplicative_p, 0.01, 0.5, bound, 1, {}, {}}, plan, ic),
                  InvalidArgument);
  CHECK_THROWS_AS(OracleRun({pp, Nonlinearity::forced_convolution, 0.1, 0.5, bound, 1, {}, {}}, plan, ic),
                  InvalidArgument);
  CHECK_THROWS_AS(OracleRun({pp, Nonlinearity::convolution_p, 0.5, 0.5, bound, 1, {}, {}}, plan, ic),
                  InvalidArgument);

  // Past the root the codomain state explodes.
  const auto blow = make_params(1, 1, 4.0, 2);
  OracleConfig cfg{blow, Nonlinearity::convolution_p, 0.05, 3.0, OracleRun::stability_bound(blow, s), 1,
                   {}, {}};
  CHECK_THROWS_AS(step_etd(OracleRun(cfg, plan, solve_codomain(0.05, ConvSolution(blow), s).u)),
                  InstabilityError);
}

TEST_CASE("scalar ODE oracle") {
  const auto lin = make_params(1, 1, 0.0, 3);
  for (double v : {0.0, 0.2}) {
    const double kappa = std::pow(2 * kPi * v, 2) + 1.0;
    CHECK(scalar_ode_oracle(v, lin, 2.0, 0.7).value ==
          doctest::Approx(2.0 * std::exp(-kappa * 0.7)).epsilon(1e-10));
  }
  const auto r = scalar_ode_oracle(0.0, make_params(1, 1, 0.1, 2), 1.0, 0.5);
  CHECK_FALSE(r.blow_up_time.has_value());
  CHECK(r.value == doctest::Approx(0.6313732617918663).epsilon(1e-10));

  const auto blow = scalar_ode_oracle(0.0, make_params(1, 1, 2.0, 2), 1.0, 2.0);
  REQUIRE(blow.blow_up_time.has_value());
  CHECK(*blow.blow_up_time == doctest::Approx(std::log(2.0)).epsilon(1e-3));

  const auto e = integrate_scalar_ode([](double, double u) { return u; }, 1.0, 0.0, 1.0);
  CHECK(e.value == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
  CHECK(integrate_scalar_ode([](double, double u) { return u; }, 3.0, 1.0, 1.0).value == 3.0);
  CHECK_THROWS_AS(integrate_scalar_ode([](double, double u) { return u; }, 1.0, 1.0, 0.0),
                  InvalidArgument);
}
