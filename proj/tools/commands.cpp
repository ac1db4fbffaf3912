#include "commands.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <spdlog/spdlog.h>

#include "nws/conv_solver.hpp"
#include "nws/errors.hpp"
#include "nws/mult_solver.hpp"
#include "svg.hpp"

namespace nws::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kResidualStep = 1e-3;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string csv_xu(const SpatialGrid& x, const std::vector<double>& u) {
  std::string out = "x,u\n";
  for (std::size_t j = 0; j < x.size(); ++j) {
    out += format_number(x.x(j));
    out += ',';
    out += format_number(u[j]);
    out += '\n';
  }
  return out;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json finite_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

// Largest relative per-frequency residual of the codomain ODE, or null next to a pole.
json conv_residual_summary(const ConvSolution& sol, const SpectralGrid& s, double t) {
  if (t == 0.0) return nullptr;
  double worst = 0.0;
  try {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double w = 2.0 * std::numbers::pi * s.s(i);
      const double kappa = sol.params().D() * w * w + sol.params().b();
      const double dt = kResidualStep * t / (1.0 + std::abs(kappa) * t);
      const auto v = sol.u(s.s(i), t);
      if (v.pole || v.branch_failure) continue;
      worst = std::max(worst, codomain_ode_residual(sol, s.s(i), t, dt).relative());
    }
  } catch (const PoleError&) {
    return {{"codomain_ode_relative_max", nullptr}, {"near_pole", true}};
  }
  return {{"codomain_ode_relative_max", worst}, {"near_pole", false}};
}

struct TimeResult {
  std::vector<double> u;
  json meta;
};

TimeResult solve_conv_at(const ConvSolution& sol, const TransformPlan& plan, double t) {
  const auto& s = plan.spectral();
  const auto codomain = solve_codomain(t, sol, s);
  TimeResult r;
  r.meta["pole_samples"] = codomain.poles.size();
  r.meta["branch_failures"] = codomain.branch_failures.size();
  if (!codomain.clean()) {
    r.u.assign(s.size(), std::numeric_limits<double>::quiet_NaN());
    r.meta["pole"] = true;
    r.meta["imag_residue"] = nullptr;
  } else {
    if (t == 0.0) throw InvalidArgument("the t = 0 state is a delta and has no grid samples");
    const auto phys = solve_physical(t, sol, plan);
    r.u = phys.u;
    r.meta["pole"] = false;
    r.meta["imag_residue"] = phys.imag_residue;
  }
  r.meta["residual"] = conv_residual_summary(sol, s, t);
  return r;
}

TimeResult solve_mult_at(const MultSolverPlan& mp, const TransformPlan& plan, double t) {
  const auto sol = solve_mult(t, mp, plan);
  TimeResult r;
  r.u = sol.u;
  r.meta["pole"] = !sol.flagged.empty();
  r.meta["flagged_frequencies"] = sol.flagged.size();
  r.meta["branch_failures"] = sol.branch_failures.size();
  r.meta["imag_residue"] = sol.imag_residue;
  const double dt = kResidualStep * t;
  if (t - 2.0 * dt >= kMultMinTime) {
    std::vector<std::vector<double>> family;
    for (int k = -2; k <= 2; ++k) family.push_back(solve_mult(t + k * dt, mp, plan).u);
    const auto res = pde_residual_physical(family, dt, mp.params(), mp.hypothesis(), mp.n(), plan,
                                           PhysicalNonlinearity::multiplicative);
    r.meta["residual"] = {{"hypothesis", std::string(to_string(mp.hypothesis()))},
                          {"pde_relative", finite_or_null(res.relative())}};
  } else {
    r.meta["residual"] = nullptr;
  }
  return r;
}

TimeResult solve_fisher_erfc_at(const PhysicalParams& pp, const SpatialGrid& x, double t) {
  TimeResult r;
  r.u.resize(x.size());
  double gap = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    r.u[j] = fisher_erfc_approx(x.x(j), t, pp);
    gap = std::max(gap, std::abs(r.u[j] - fisher_erfc_corrected(x.x(j), t, pp)));
  }
  r.meta["pole"] = false;
  r.meta["max_difference_to_corrected_form"] = gap;
  return r;
}

TimeResult solve_fisher_genetic_at(const PhysicalParams& pp, const RunConfig& c,
                                   const TransformPlan& plan, double t) {
  const std::vector<std::function<double(double)>> none;
  const auto field = fisher_quadratic(t, pp, plan.spectral(), none, c.prob_product, c.quad_rel_tol);
  auto inv = plan.inverse_checked(field);
  TimeResult r;
  r.u = std::move(inv.values);
  r.meta["pole"] = false;
  r.meta["imag_residue"] = inv.imag_residue;
  return r;
}

json root_summary(const PhysicalParams& pp, const KernelSpec& kernel) {
  try {
    const auto r = root_locus(pp, kernel);
    return {{"s", r.s},
            {"regime", std::string(to_string(r.regime))},
            {"t0", optional_number(r.t0)},
            {"formula_t0", optional_number(r.formula_t0)},
            {"bisection_t0", optional_number(r.bisection_t0)},
            {"difference", r.difference}};
  } catch (const InvalidArgument&) {
    return {{"s", 0.0}, {"regime", "undefined"}};
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

SolveResult cmd_solve(const RunConfig& config, const fs::path& out_dir, bool svg) {
  const auto pp = validate_params(config.params);
  const auto kernel = config.kernel();
  const auto grids = make_grids(config.grid_n, config.grid_L);
  const TransformPlan plan(grids);
  const auto& x = grids.first;

  fs::create_directories(out_dir);
  SolveResult result;
  json& meta = result.metadata;
  meta["tool"] = "nws";
  meta["version"] = NWS_VERSION;
  meta["config"] = to_json(config);
  meta["grid"] = {{"n", x.size()}, {"L", x.length()}, {"dx", x.dx()}, {"ds", grids.second.ds()}};
  if (config.equation == Equation::conv) meta["root"] = root_summary(pp, kernel);

  std::optional<ConvSolution> conv;
  std::optional<MultSolverPlan> mult;
  if (config.equation == Equation::conv) conv.emplace(pp, kernel);
  if (config.equation == Equation::mult) mult.emplace(pp, kernel, config.hypothesis);

  std::vector<PlotSeries> series;
  json times = json::array();
  for (std::size_t k = 0; k < config.times.size(); ++k) {
    const double t = config.times[k];
    spdlog::info("solving {} at t = {}", to_string(config.equation), t);
    TimeResult r;
    switch (config.equation) {
      case Equation::conv:
        r = solve_conv_at(*conv, plan, t);
        break;
      case Equation::mult:
        r = solve_mult_at(*mult, plan, t);
        break;
      case Equation::fisher_erfc:
        r = solve_fisher_erfc_at(pp, x, t);
        break;
      case Equation::fisher_genetic:
        r = solve_fisher_genetic_at(pp, config, plan, t);
        break;
    }
    const auto name = fmt::format("u_t{}.csv", k);
    const auto path = out_dir / name;
    write_file(path, csv_xu(x, r.u));
    result.csv_files.push_back(path);
    r.meta["t"] = t;
    r.meta["file"] = name;
    times.push_back(std::move(r.meta));
    series.push_back({fmt::format("t = {:g}", t), std::move(r.u)});
  }
  meta["times"] = std::move(times);

  if (svg) {
    const auto xs = x.points();
    const auto path = out_dir / "u.svg";
    write_file(path, render_line_plot(xs, series, fmt::format("{} solution", to_string(config.equation)),
                                      "x", "u(x, t)"));
    result.svg_files.push_back(path);
    meta["svg"] = "u.svg";
  }

  result.metadata_file = out_dir / "metadata.json";
  write_file(result.metadata_file, meta.dump(2) + "\n");
  return result;
}

void cmd_sweep(const SweepConfig& config, const fs::path& out) {
  KernelSpec kernel;
  kernel.C = IntegrationConstant::constant(config.C);
  std::string csv = "eps,b,p,t0,regime\n";
  for (double eps : config.eps) {
    for (double b : config.b) {
      for (int p : config.p) {
        const auto pp = make_params(config.D, b, eps, p);
        std::string t0 = "nan";
        std::string regime = "undefined";
        try {
          const auto r = root_locus(pp, kernel, config.s);
          regime = std::string(to_string(r.regime));
          if (r.t0) t0 = format_number(*r.t0);
        } catch (const InvalidArgument&) {
        }
        csv += fmt::format("{},{},{},{},{}\n", format_number(eps), format_number(b), p, t0, regime);
      }
    }
  }
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_file(out, csv);
}

}  // namespace nws::app
