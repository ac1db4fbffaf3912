#include "nws/oracle.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nws/errors.hpp"

namespace nws {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kContourPoints = 64;
constexpr double kMinMultiplicativeStart = 0.05;

struct EtdCoefficients {
  std::vector<double> E, E2, Q, f1, f2, f3;
};

// Kassam-Trefethen contour means avoid cancellation in phi-functions near z = 0.
EtdCoefficients etd_coefficients(const std::vector<double>& linear, double h) {
  const std::size_t n = linear.size();
  EtdCoefficients c;
  for (auto* v : {&c.E, &c.E2, &c.Q, &c.f1, &c.f2, &c.f3}) v->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = linear[i] * h;
    c.E[i] = std::exp(z);
    c.E2[i] = std::exp(z / 2.0);
    Complex q = 0.0, a = 0.0, b = 0.0, d = 0.0;
    for (int k = 0; k < kContourPoints; ++k) {
      const Complex r = z + std::polar(1.0, kPi * (k + 0.5) / kContourPoints);
      const Complex er = std::exp(r);
      const Complex r3 = r * r * r;
      q += (std::exp(r / 2.0) - 1.0) / r;
      a += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
      b += (2.0 + r + er * (r - 2.0)) / r3;
      d += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
    }
    c.Q[i] = h * q.real() / kContourPoints;
    c.f1[i] = h * a.real() / kContourPoints;
    c.f2[i] = h * b.real() / kContourPoints;
    c.f3[i] = h * d.real() / kContourPoints;
  }
  return c;
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

Complex int_power(Complex z, int p) {
  Complex r = z;
  for (int k = 1; k < p; ++k) r *= z;
  return r;
}

class NonlinearTerm {
 public:
  explicit NonlinearTerm(const OracleRun& run) : run_(run) {
    const auto& grid = run.plan().spectral();
    const std::size_t n = grid.size();
    weight_.assign(n, run.config().params.eps());
    if (run.config().nonlinear_weight) {
      for (std::size_t i = 0; i < n; ++i) weight_[i] *= run.config().nonlinear_weight(grid.s(i));
    }
    if (run.config().nonlinearity == Nonlinearity::multiplicative_p) {
      // Zero padding to (p+1)/2 n removes aliasing of the degree-p product.
      const std::size_t needed = (static_cast<std::size_t>(run.config().params.p()) + 1) * n / 2;
      padded_.emplace(make_grids(next_pow2(needed), grid.length()));
    }
  }

  std::vector<Complex> operator()(const std::vector<Complex>& u, double t) const {
    const auto& cfg = run_.config();
    const auto& grid = run_.plan().spectral();
    const std::size_t n = u.size();
    const int p = cfg.params.p();
    std::vector<Complex> out(n);
    if (cfg.nonlinearity == Nonlinearity::multiplicative_p) {
      const std::size_t np = padded_->spectral().size();
      const std::size_t offset = (np - n) / 2;
      std::vector<Complex> big(np, 0.0);
      for (std::size_t i = 1; i < n; ++i) big[i + offset] = u[i];
      const auto phys = padded_->inverse_checked(SpectralField(padded_->spectral(), t, big)).values;
      std::vector<double> powered(phys.size());
      for (std::size_t j = 0; j < phys.size(); ++j) powered[j] = std::pow(phys[j], p);
      const auto back = padded_->forward(std::span<const double>(powered), t);
      for (std::size_t i = 1; i < n; ++i) out[i] = weight_[i] * back[i + offset];
      out[0] = 0.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = weight_[i] * int_power(u[i], p);
    }
    if (cfg.nonlinearity == Nonlinearity::forced_convolution && cfg.forcing) {
      for (std::size_t i = 0; i < n; ++i) out[i] += cfg.forcing(grid.s(i), t);
    }
    return out;
  }

 private:
  const OracleRun& run_;
  std::vector<double> weight_;
  std::optional<TransformPlan> padded_;
};

double max_modulus(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& c : v) {
    const double a = std::abs(c);
    if (!std::isfinite(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

}  // namespace

std::string_view to_string(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::convolution_p:
      return "convolution_p";
    case Nonlinearity::multiplicative_p:
      return "multiplicative_p";
    case Nonlinearity::forced_convolution:
      return "forced_convolution";
  }
  return "unknown";
}

double OracleRun::stability_bound(const PhysicalParams& params, const SpectralGrid& grid) {
  const double w = 2.0 * kPi * grid.nyquist();
  return 0.5 / (params.D() * w * w + std::abs(params.b()));
}

OracleRun::OracleRun(OracleConfig config, TransformPlan plan, SpectralField initial)
    : config_(std::move(config)), plan_(std::move(plan)), initial_(std::move(initial)) {
  if (!(initial_.grid() == plan_.spectral())) {
    throw InvalidArgument("oracle initial state lives on a different grid");
  }
  if (!(config_.t_end > config_.t_start) || !std::isfinite(config_.t_end)) {
    throw InvalidArgument("oracle needs t_end > t_start");
  }
  if (config_.nonlinearity == Nonlinearity::multiplicative_p &&
      config_.t_start < kMinMultiplicativeStart) {
    throw InvalidArgument("multiplicative oracle runs start at t >= 0.05");
  }
  if (config_.nonlinearity == Nonlinearity::forced_convolution && !config_.forcing) {
    throw InvalidArgument("forced oracle run needs a forcing function");
  }
  if (!(config_.dt > 0.0)) throw InvalidArgument("oracle dt must be positive");
  if (config_.store_every == 0) throw InvalidArgument("store_every must be >= 1");
  const double bound = stability_bound(config_.params, plan_.spectral());
  if (config_.dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "oracle dt = " << config_.dt << " exceeds the stability bound " << bound;
    throw InvalidArgument(msg.str());
  }
  const double span = config_.t_end - config_.t_start;
  steps_ = static_cast<std::size_t>(std::ceil(span / config_.dt - 1e-9));
  steps_ = std::max<std::size_t>(steps_, 1);
  step_ = span / static_cast<double>(steps_);
}

Trajectory step_etd(const OracleRun& run) {
  const auto& cfg = run.config();
  const auto& grid = run.plan().spectral();
  const std::size_t n = grid.size();
  const double h = run.step();

  std::vector<double> linear(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 2.0 * kPi * grid.s(i);
    linear[i] = -(cfg.params.D() * w * w + cfg.params.b());
  }
  const auto c = etd_coefficients(linear, h);
  const NonlinearTerm N(run);

  std::vector<Complex> u(run.initial().values().begin(), run.initial().values().end());
  const double start_norm = std::max(max_modulus(u), 1e-300);

  Trajectory traj;
  traj.times.push_back(cfg.t_start);
  traj.states.push_back(run.initial());

  std::vector<Complex> a(n), b(n), cc(n);
  for (std::size_t step = 1; step <= run.steps(); ++step) {
    const double t = cfg.t_start + static_cast<double>(step - 1) * h;
    // Forcing is sampled inside the step so that jumps at step boundaries resolve one-sidedly.
    const double inset = 1e-9 * h;
    const auto Nu = N(u, t + inset);
    for (std::size_t i = 0; i < n; ++i) a[i] = c.E2[i] * u[i] + c.Q[i] * Nu[i];
    const auto Na = N(a, t + h / 2.0);
    for (std::size_t i = 0; i < n; ++i) b[i] = c.E2[i] * u[i] + c.Q[i] * Na[i];
    const auto Nb = N(b, t + h / 2.0);
    for (std::size_t i = 0; i < n; ++i) cc[i] = c.E2[i] * a[i] + c.Q[i] * (2.0 * Nb[i] - Nu[i]);
    const auto Nc = N(cc, t + h - inset);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = c.E[i] * u[i] + c.f1[i] * Nu[i] + 2.0 * c.f2[i] * (Na[i] + Nb[i]) + c.f3[i] * Nc[i];
    }

    const double norm = max_modulus(u);
    if (!std::isfinite(norm) || norm > 1e6 * start_norm) {
      std::ostringstream msg;
      msg << "oracle unstable at step " << step << " (t = " << t + h << "): max|u| = " << norm
          << " from " << start_norm;
      throw InstabilityError(msg.str());
    }
    const double t_now = step == run.steps() ? cfg.t_end : t + h;
    if (step % cfg.store_every == 0 || step == run.steps()) {
      traj.times.push_back(t_now);
      traj.states.emplace_back(grid, t_now, u);
    }
  }
  return traj;
}

namespace {

struct BlowUp {
  double t;
  double u;
};

}  // namespace

ScalarOracleResult integrate_scalar_ode(const std::function<double(double, double)>& rhs,
                                        double u0, double t0, double t_end, double rel_tol,
                                        double blow_up_threshold) {
  namespace odeint = boost::numeric::odeint;
  if (!(t_end >= t0)) throw InvalidArgument("scalar oracle needs t_end >= t_start");
  ScalarOracleResult out;
  if (t_end == t0) {
    out.value = u0;
    out.t_reached = t0;
    return out;
  }
  using State = double;
  const double abs_tol = rel_tol * std::max(std::abs(u0), 1e-300) * 1e-3;
  auto stepper = odeint::make_controlled(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
  State u = u0;
  const auto system = [&](const State& x, State& dxdt, double t) { dxdt = rhs(t, x); };
  const auto observer = [&](const State& x, double t) {
    if (!std::isfinite(x) || std::abs(x) > blow_up_threshold) throw BlowUp{t, x};
  };
  try {
    odeint::integrate_adaptive(stepper, system, u, t0, t_end, (t_end - t0) * 1e-4, observer);
    out.value = u;
    out.t_reached = t_end;
  } catch (const BlowUp& b) {
    out.value = b.u;
    out.t_reached = b.t;
    out.blow_up_time = b.t;
  }
  return out;
}

ScalarOracleResult scalar_ode_oracle(double s, const PhysicalParams& params, double u0,
                                     double t_end) {
  const double w = 2.0 * kPi * s;
  const double kappa = params.D() * w * w + params.b();
  const double eps = params.eps();
  const int p = params.p();
  auto result = integrate_scalar_ode(
      [&](double, double u) { return -kappa * u + eps * std::pow(u, p); }, u0, 0.0, t_end);
  if (result.blow_up_time) {
    // Near blow-up u' ~ eps u^p, leaving 1 / ((p-1) eps u^(p-1)) to go.
    const double u = result.value;
    if (std::isfinite(u) && eps != 0.0) {
      *result.blow_up_time += 1.0 / ((p - 1) * eps * std::pow(u, p - 1));
    }
  }
  return result;
}

}  // namespace nws
