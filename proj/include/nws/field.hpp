#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "nws/grid.hpp"

namespace nws {

using Complex = std::complex<double>;

/// Complex samples of a codomain function over a SpectralGrid at one time.
class SpectralField {
 public:
  SpectralField(SpectralGrid grid, double time, std::vector<Complex> values);

  /// Samples fn(s) at every grid frequency.
  static SpectralField sample(const SpectralGrid& grid, double time,
                              const std::function<Complex(double)>& fn);

  const SpectralGrid& grid() const { return grid_; }
  double time() const { return time_; }
  std::span<const Complex> values() const { return values_; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  SpectralField multiplied(const SpectralField& other) const;
  SpectralField scaled(Complex factor) const;

 private:
  SpectralGrid grid_;
  double time_;
  std::vector<Complex> values_;
};

/// value(-s) == conj(value(s)) within rel_tol of the field's max modulus.
/// The Nyquist sample has no partner and must be real.
bool is_hermitian(const SpectralField& field, double rel_tol = 1e-12);

double max_abs(std::span<const Complex> v);
double max_abs(std::span<const double> v);

}  // namespace nws
