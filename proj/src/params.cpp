#include "nws/params.hpp"

#include <cmath>

#include "nws/errors.hpp"

namespace nws {

std::vector<std::string> param_violations(const RawParams& raw) {
  std::vector<std::string> out;
  if (!std::isfinite(raw.D) || !std::isfinite(raw.b) || !std::isfinite(raw.eps) ||
      !std::isfinite(raw.p)) {
    out.emplace_back("all coefficients must be finite");
  }
  if (!(raw.D > 0.0)) out.emplace_back("D must be positive");
  if (std::isfinite(raw.p)) {
    if (raw.p != std::floor(raw.p)) out.emplace_back("p must be an integer");
    if (raw.p < 2.0) out.emplace_back("p must be >= 2");
  }
  return out;
}

PhysicalParams validate_params(const RawParams& raw) {
  const auto violations = param_violations(raw);
  if (!violations.empty()) {
    std::string msg = "invalid parameters: ";
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i != 0) msg += "; ";
      msg += violations[i];
    }
    throw InvalidArgument(msg);
  }
  return PhysicalParams(raw.D, raw.b, raw.eps, static_cast<int>(raw.p));
}

PhysicalParams PhysicalParams::with_eps(double eps) const {
  return validate_params({D_, b_, eps, static_cast<double>(p_)});
}

}  // namespace nws
