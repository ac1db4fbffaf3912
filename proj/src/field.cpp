#include "nws/field.hpp"

#include <algorithm>
#include <cmath>

#include "nws/errors.hpp"

namespace nws {

SpectralField::SpectralField(SpectralGrid grid, double time, std::vector<Complex> values)
    : grid_(grid), time_(time), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("spectral field size does not match its grid");
  }
}

SpectralField SpectralField::sample(const SpectralGrid& grid, double time,
                                    const std::function<Complex(double)>& fn) {
  std::vector<Complex> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.s(i));
  return {grid, time, std::move(v)};
}

SpectralField SpectralField::multiplied(const SpectralField& other) const {
  if (!(other.grid_ == grid_)) throw InvalidArgument("fields live on different grids");
  std::vector<Complex> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * other.values_[i];
  return {grid_, time_, std::move(v)};
}

SpectralField SpectralField::scaled(Complex factor) const {
  std::vector<Complex> v(values_);
  for (auto& c : v) c *= factor;
  return {grid_, time_, std::move(v)};
}

double max_abs(std::span<const Complex> v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

bool is_hermitian(const SpectralField& field, double rel_tol) {
  const auto v = field.values();
  const std::size_t n = v.size();
  const double scale = std::max(max_abs(v), 1e-300);
  // Index i holds k = i - n/2; its partner -k lives at n - i (mod n).
  if (std::abs(v[0].imag()) > rel_tol * scale) return false;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t j = n - i;
    if (std::abs(v[i] - std::conj(v[j])) > rel_tol * scale) return false;
  }
  return true;
}

}  // namespace nws
