#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nws/errors.hpp"

namespace nws::app {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key + " must be finite");
  return d;
}

std::string string_value(const json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError(what + " must be a string");
  return v.get<std::string>();
}

std::vector<double> number_range(const json& v, const std::string& what) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(what + " entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else if (v.is_object()) {
    reject_unknown(v, {"start", "stop", "count"}, what);
    const double start = number(v, "start", what);
    const double stop = number(v, "stop", what);
    const auto& c = v.at("count");
    if (!c.is_number_integer() || c.get<long>() < 1) throw ConfigError(what + ".count must be >= 1");
    const long count = c.get<long>();
    for (long k = 0; k < count; ++k) {
      out.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(k) / (count - 1));
    }
  } else {
    throw ConfigError(what + " must be a list or a {start, stop, count} range");
  }
  if (out.empty()) throw ConfigError(what + " is empty");
  for (double d : out) {
    if (!std::isfinite(d)) throw ConfigError(what + " entries must be finite");
  }
  return out;
}

template <typename Fn>
auto with_context(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::out_of_range& e) {
    throw ConfigError(what + ": missing required key (" + std::string(e.what()) + ")");
  } catch (const json::type_error& e) {
    throw ConfigError(what + ": wrong value type (" + std::string(e.what()) + ")");
  } catch (const nws::InvalidArgument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(Equation e) {
  switch (e) {
    case Equation::conv:
      return "conv";
    case Equation::mult:
      return "mult";
    case Equation::fisher_erfc:
      return "fisher_erfc";
    case Equation::fisher_genetic:
      return "fisher_genetic";
  }
  return "unknown";
}

Equation equation_from_string(std::string_view s) {
  for (auto e : {Equation::conv, Equation::mult, Equation::fisher_erfc, Equation::fisher_genetic}) {
    if (to_string(e) == s) return e;
  }
  throw ConfigError("unknown equation '" + std::string(s) + "'");
}

bool RunConfig::operator==(const RunConfig& o) const {
  return equation == o.equation && params.D == o.params.D && params.b == o.params.b &&
         params.eps == o.params.eps && params.p == o.params.p && grid_n == o.grid_n &&
         grid_L == o.grid_L && times == o.times && C == o.C &&
         factor_count_convention == o.factor_count_convention && quad_rel_tol == o.quad_rel_tol &&
         pole_policy == o.pole_policy && pole_tol == o.pole_tol && hypothesis == o.hypothesis &&
         prob_product == o.prob_product && out_dir == o.out_dir && svg == o.svg;
}

KernelSpec RunConfig::kernel() const {
  KernelSpec k;
  k.C = IntegrationConstant::constant(C);
  k.factor_count_convention = factor_count_convention;
  k.quad_rel_tol = quad_rel_tol;
  k.pole_policy = pole_policy;
  k.pole_tol = pole_tol;
  return k;
}

json to_json(const RunConfig& c) {
  return {
      {"equation", std::string(to_string(c.equation))},
      {"params", {{"D", c.params.D}, {"b", c.params.b}, {"eps", c.params.eps}, {"p", c.params.p}}},
      {"grid", {{"n", c.grid_n}, {"L", c.grid_L}}},
      {"times", c.times},
      {"kernel",
       {{"C", c.C},
        {"factor_count_convention", std::string(to_string(c.factor_count_convention))},
        {"quad_rel_tol", c.quad_rel_tol},
        {"pole_policy", std::string(to_string(c.pole_policy))},
        {"pole_tol", c.pole_tol}}},
      {"mult", {{"hypothesis", std::string(to_string(c.hypothesis))}}},
      {"fisher", {{"prob_product", c.prob_product}}},
      {"output", {{"dir", c.out_dir}, {"svg", c.svg}}},
  };
}

RunConfig run_config_from_json(const json& j) {
  return with_context("config", [&] {
    reject_unknown(j, {"equation", "params", "grid", "times", "kernel", "mult", "fisher", "output"},
                   "config");
    RunConfig c;
    c.equation = equation_from_string(string_value(j.at("equation"), "equation"));

    const auto& p = j.at("params");
    reject_unknown(p, {"D", "b", "eps", "p"}, "params");
    c.params = {number(p, "D", "params"), number(p, "b", "params"), number(p, "eps", "params"),
                number(p, "p", "params")};
    const auto violations = param_violations(c.params);
    if (!violations.empty()) throw ConfigError("params: " + violations.front());

    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      reject_unknown(g, {"n", "L"}, "grid");
      if (g.contains("n")) {
        if (!g.at("n").is_number_integer() || g.at("n").get<long>() < 4) {
          throw ConfigError("grid.n must be an integer >= 4");
        }
        c.grid_n = g.at("n").get<std::size_t>();
      }
      if (g.contains("L")) c.grid_L = number(g, "L", "grid");
      make_grids(c.grid_n, c.grid_L);
    }

    c.times = number_range(j.at("times"), "times");
    for (double t : c.times) {
      if (!(t >= 0.0)) throw ConfigError("times must be >= 0");
    }

    if (j.contains("kernel")) {
      const auto& k = j.at("kernel");
      reject_unknown(k, {"C", "factor_count_convention", "quad_rel_tol", "pole_policy", "pole_tol"},
                     "kernel");
      if (k.contains("C")) c.C = number(k, "C", "kernel");
      if (k.contains("factor_count_convention")) {
        c.factor_count_convention = factor_count_from_string(
            string_value(k.at("factor_count_convention"), "kernel.factor_count_convention"));
      }
      if (k.contains("quad_rel_tol")) c.quad_rel_tol = number(k, "quad_rel_tol", "kernel");
      if (k.contains("pole_policy")) {
        c.pole_policy = pole_policy_from_string(string_value(k.at("pole_policy"), "kernel.pole_policy"));
      }
      if (k.contains("pole_tol")) c.pole_tol = number(k, "pole_tol", "kernel");
      if (!(c.quad_rel_tol > 0.0) || !(c.pole_tol > 0.0)) {
        throw ConfigError("kernel tolerances must be positive");
      }
    }
    if (j.contains("mult")) {
      const auto& m = j.at("mult");
      reject_unknown(m, {"hypothesis"}, "mult");
      if (m.contains("hypothesis")) {
        c.hypothesis = scaling_hypothesis_from_string(string_value(m.at("hypothesis"), "mult.hypothesis"));
      }
    }
    if (j.contains("fisher")) {
      const auto& f = j.at("fisher");
      reject_unknown(f, {"prob_product"}, "fisher");
      if (f.contains("prob_product")) c.prob_product = number(f, "prob_product", "fisher");
      if (!(c.prob_product > 0.0 && c.prob_product <= 1.0)) {
        throw ConfigError("fisher.prob_product must lie in (0, 1]");
      }
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      reject_unknown(o, {"dir", "svg"}, "output");
      if (o.contains("dir")) c.out_dir = string_value(o.at("dir"), "output.dir");
      if (o.contains("svg")) {
        if (!o.at("svg").is_boolean()) throw ConfigError("output.svg must be a boolean");
        c.svg = o.at("svg").get<bool>();
      }
    }
    return c;
  });
}

RunConfig parse_run_config(std::string_view text) {
  return run_config_from_json(parse_json(text));
}

SweepConfig sweep_config_from_json(const json& j) {
  return with_context("sweep config", [&] {
    reject_unknown(j, {"D", "s", "C", "eps", "b", "p"}, "sweep config");
    SweepConfig c;
    if (j.contains("D")) c.D = number(j, "D", "sweep");
    if (j.contains("s")) c.s = number(j, "s", "sweep");
    if (j.contains("C")) c.C = number(j, "C", "sweep");
    c.eps = number_range(j.at("eps"), "eps");
    c.b = number_range(j.at("b"), "b");
    for (double p : number_range(j.at("p"), "p")) {
      if (p != std::floor(p) || p < 2) throw ConfigError("p entries must be integers >= 2");
      c.p.push_back(static_cast<int>(p));
    }
    if (!(c.D > 0.0)) throw ConfigError("sweep.D must be positive");
    return c;
  });
}

SweepConfig parse_sweep_config(std::string_view text) {
  return sweep_config_from_json(parse_json(text));
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "malformed JSON at byte " << e.byte << ": " << e.what();
    throw ConfigError(msg.str());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace nws::app
