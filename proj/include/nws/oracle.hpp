#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "nws/field.hpp"
#include "nws/params.hpp"
#include "nws/spectral.hpp"

namespace nws {

enum class Nonlinearity { convolution_p, multiplicative_p, forced_convolution };
std::string_view to_string(Nonlinearity n);

struct OracleConfig {
  PhysicalParams params;
  Nonlinearity nonlinearity = Nonlinearity::convolution_p;
  double t_start = 0.0;
  double t_end = 0.0;
  /// Upper bound on the step; the run uses the largest step <= dt that divides the interval.
  double dt = 0.0;
  /// Keep every k-th state (the final state is always kept).
  std::size_t store_every = 1;
  /// Codomain forcing k(s,t), used by forced_convolution.
  std::function<Complex(double s, double t)> forcing;
  /// Optional codomain weight w(s) on the nonlinear term: eps w(s) N(u).
  std::function<double(double s)> nonlinear_weight;
};

/// A validated oracle run: grid, coefficients, schedule and initial state.
/// Construction checks dt <= 0.5 / (D (2 pi s_max)^2 + |b|).
class OracleRun {
 public:
  OracleRun(OracleConfig config, TransformPlan plan, SpectralField initial);

  const OracleConfig& config() const { return config_; }
  const TransformPlan& plan() const { return plan_; }
  const SpectralField& initial() const { return initial_; }
  std::size_t steps() const { return steps_; }
  double step() const { return step_; }

  static double stability_bound(const PhysicalParams& params, const SpectralGrid& grid);

 private:
  OracleConfig config_;
  TransformPlan plan_;
  SpectralField initial_;
  std::size_t steps_;
  double step_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  const SpectralField& final_state() const { return states.back(); }
};

/// Fourth-order exponential time differencing (Cox-Matthews, contour-integral
/// coefficients) with the linear part -(D (2 pi s)^2 + b) integrated exactly.
/// Throws InstabilityError when the state norm grows beyond 1e6 times its start.
Trajectory step_etd(const OracleRun& run);

struct ScalarOracleResult {
  double value = 0.0;
  double t_reached = 0.0;
  /// Estimated blow-up time when |u| exceeded the threshold.
  std::optional<double> blow_up_time;
};

/// u' = -(D (2 pi s)^2 + b) u + eps u^p from u(0) = u0, adaptive Dormand-Prince
/// at 1e-12 relative tolerance. Blow-up is declared at |u| > 1e10 and the time is
/// extrapolated from u' ~ eps u^p.
ScalarOracleResult scalar_ode_oracle(double s, const PhysicalParams& params, double u0,
                                     double t_end);

/// Same integrator for an arbitrary scalar right-hand side f(t, u).
ScalarOracleResult integrate_scalar_ode(const std::function<double(double, double)>& rhs,
                                        double u0, double t0, double t_end,
                                        double rel_tol = 1e-12,
                                        double blow_up_threshold = 1e10);

}  // namespace nws
