#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace nws {

class SpectralGrid;

/// Uniform periodic grid on [-L, L): x_j = -L + j dx, dx = 2L/n.
/// x = 0 sits at index n/2, which is where the heat kernel is centered.
class SpatialGrid {
 public:
  std::size_t size() const { return n_; }
  double length() const { return L_; }
  double dx() const { return 2.0 * L_ / static_cast<double>(n_); }
  double x(std::size_t j) const { return -L_ + static_cast<double>(j) * dx(); }
  std::size_t origin_index() const { return n_ / 2; }
  std::vector<double> points() const;

  bool operator==(const SpatialGrid&) const = default;

 private:
  friend std::pair<SpatialGrid, SpectralGrid> make_grids(std::size_t, double);
  SpatialGrid(std::size_t n, double L) : n_(n), L_(L) {}
  std::size_t n_;
  double L_;
};

/// Ordinary-frequency dual of a SpatialGrid. Samples are stored in centered
/// order: index i holds s = (i - n/2) ds with ds = 1/(2L), so s = 0 is at n/2
/// and the Nyquist frequency -n/(4L) is at index 0.
class SpectralGrid {
 public:
  std::size_t size() const { return n_; }
  double length() const { return L_; }
  double ds() const { return 1.0 / (2.0 * L_); }
  long wavenumber(std::size_t i) const { return static_cast<long>(i) - static_cast<long>(n_ / 2); }
  double s(std::size_t i) const { return static_cast<double>(wavenumber(i)) * ds(); }
  double nyquist() const { return static_cast<double>(n_) / (4.0 * L_); }
  std::size_t zero_index() const { return n_ / 2; }
  std::vector<double> frequencies() const;

  /// Centered index -> FFT bin (k mod n) and back.
  std::size_t fft_bin(std::size_t i) const { return (i + n_ / 2) % n_; }
  std::size_t centered_index(std::size_t bin) const { return (bin + n_ / 2) % n_; }

  bool operator==(const SpectralGrid&) const = default;

 private:
  friend std::pair<SpatialGrid, SpectralGrid> make_grids(std::size_t, double);
  SpectralGrid(std::size_t n, double L) : n_(n), L_(L) {}
  std::size_t n_;
  double L_;
};

/// Builds the dual pair. n_points must be a power of two >= 16, length > 0.
std::pair<SpatialGrid, SpectralGrid> make_grids(std::size_t n_points, double length);

/// Grid used by the shipped examples: n = 256, L = 20.
inline constexpr std::size_t kDefaultPoints = 256;
inline constexpr double kDefaultLength = 20.0;
std::pair<SpatialGrid, SpectralGrid> default_grids();

/// Anti-aliasing guard: g(s_max, t_min) = exp(-D (2 pi s_max)^2 t_min) <= floor.
bool band_limit_ok(const SpectralGrid& grid, double D, double t_min, double floor);

}  // namespace nws
