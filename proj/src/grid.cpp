#include "nws/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nws/errors.hpp"

namespace nws {

std::vector<double> SpatialGrid::points() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = x(j);
  return out;
}

std::vector<double> SpectralGrid::frequencies() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = s(i);
  return out;
}

std::pair<SpatialGrid, SpectralGrid> make_grids(std::size_t n_points, double length) {
  if (n_points < 16) {
    throw InvalidArgument("n_points must be at least 16 (got " + std::to_string(n_points) + ")");
  }
  if ((n_points & (n_points - 1)) != 0) {
    throw InvalidArgument("n_points must be a power of two (got " + std::to_string(n_points) + ")");
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("length must be positive and finite");
  }
  return {SpatialGrid(n_points, length), SpectralGrid(n_points, length)};
}

std::pair<SpatialGrid, SpectralGrid> default_grids() {
  return make_grids(kDefaultPoints, kDefaultLength);
}

bool band_limit_ok(const SpectralGrid& grid, double D, double t_min, double floor) {
  const double w = 2.0 * std::numbers::pi * grid.nyquist();
  return std::exp(-D * w * w * t_min) <= floor;
}

}  // namespace nws
