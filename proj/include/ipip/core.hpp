#pragma once

// Physical parameters, uniform grids and sampled complex lines.
//
// Coordinate convention used throughout the library: the boundary semi-line
// is parametrized by the positive distance z > 0 behind the image line, so a
// boundary node z corresponds to the physical longitudinal coordinate -z.
// The image line is the physical line z = 0, x >= 0.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ipip {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct PhysicalParams {
  double wavelength = 0.0;
  double wavenumber = 0.0;
  double theta = 0.0;  ///< inclination of the boundary line, radians

  static PhysicalParams from_wavelength(double lambda, double theta = 0.0) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw std::domain_error("wavelength must be positive and finite");
    if (!(std::abs(theta) < pi / 2))
      throw std::domain_error("inclination angle must satisfy |theta| < pi/2");
    return PhysicalParams{lambda, 2.0 * pi / lambda, theta};
  }
};

/// Uniform grid on the boundary semi-line, z_n = z_min + n * step, n = 0..N.
class ZGrid {
 public:
  ZGrid(double z_min, double z_max, std::size_t n_intervals) : z_min_(z_min), z_max_(z_max), n_(n_intervals) {
    if (!(z_min > 0.0))
      throw std::domain_error("ZGrid: z_min must be positive (reconstruction variable is z > 0)");
    if (!(z_max > z_min) || !std::isfinite(z_max))
      throw std::domain_error("ZGrid: z_max must exceed z_min");
    if (n_intervals < 2) throw std::domain_error("ZGrid: at least 2 intervals required");
    step_ = (z_max - z_min) / static_cast<double>(n_intervals);
  }

  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  std::size_t intervals() const { return n_; }
  std::size_t size() const { return n_ + 1; }
  double step() const { return step_; }
  double node(std::size_t n) const { return z_min_ + static_cast<double>(n) * step_; }
  /// Physical longitudinal coordinate of node n.
  double physical(std::size_t n) const { return -node(n); }

  std::vector<double> nodes() const {
    std::vector<double> out(size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = node(n);
    return out;
  }

  friend bool operator==(const ZGrid&, const ZGrid&) = default;

 private:
  double z_min_;
  double z_max_;
  std::size_t n_;
  double step_ = 0.0;
};

/// Uniform grid on the image line, x_s = x_min + s * step, s = 0..N_x.
class XGrid {
 public:
  XGrid(double x_min, double x_max, std::size_t n_intervals) : x_min_(x_min), x_max_(x_max), n_(n_intervals) {
    if (!(x_min >= 0.0)) throw std::domain_error("XGrid: x_min must be non-negative");
    if (!(x_max > x_min) || !std::isfinite(x_max)) throw std::domain_error("XGrid: x_max must exceed x_min");
    if (n_intervals < 2) throw std::domain_error("XGrid: at least 2 intervals required");
    step_ = (x_max - x_min) / static_cast<double>(n_intervals);
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t intervals() const { return n_; }
  std::size_t size() const { return n_ + 1; }
  double step() const { return step_; }
  double node(std::size_t s) const { return x_min_ + static_cast<double>(s) * step_; }

  std::vector<double> nodes() const {
    std::vector<double> out(size());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = node(s);
    return out;
  }

  friend bool operator==(const XGrid&, const XGrid&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double step_ = 0.0;
};

inline ZGrid make_zgrid(double z_min, double z_max, std::size_t n) { return ZGrid(z_min, z_max, n); }
inline XGrid make_xgrid(double x_min, double x_max, std::size_t n) { return XGrid(x_min, x_max, n); }

template <class G>
concept UniformGrid = requires(const G& g, std::size_t i) {
  { g.size() } -> std::convertible_to<std::size_t>;
  { g.node(i) } -> std::convertible_to<double>;
  { g.step() } -> std::convertible_to<double>;
};

/// Complex amplitude sampled at every node of a grid.
template <UniformGrid Grid>
class ComplexLine {
 public:
  ComplexLine(Grid grid, std::vector<cplx> samples) : grid_(std::move(grid)), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size())
      throw std::invalid_argument("ComplexLine: sample count " + std::to_string(samples_.size()) +
                                  " does not match grid node count " + std::to_string(grid_.size()));
    for (const auto& v : samples_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::invalid_argument("ComplexLine: non-finite sample");
  }

  /// All-zero line.
  explicit ComplexLine(Grid grid) : grid_(std::move(grid)), samples_(grid_.size(), cplx{}) {}

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return samples_.size(); }
  std::span<const cplx> samples() const { return samples_; }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }

 private:
  Grid grid_;
  std::vector<cplx> samples_;
};

using BoundaryLine = ComplexLine<ZGrid>;
using ImageLine = ComplexLine<XGrid>;

enum class RegularizationMode { unit, phase, shift };

struct Regularization {
  RegularizationMode mode = RegularizationMode::unit;
  double delta = 0.0;

  cplx alpha() const {
    switch (mode) {
      case RegularizationMode::phase:
        return delta == 0.0 ? cplx{1.0, 0.0} : std::exp(I * delta);
      case RegularizationMode::shift:
        return {1.0 + delta, 0.0};
      case RegularizationMode::unit:
        break;
    }
    return {1.0, 0.0};
  }
};

/// x' = x + z tan(theta), z' = z. Maps the inclined boundary line x + z tan(theta) = 0 onto x' = 0.
inline std::pair<double, double> shear_transform(double x, double z, double theta) {
  return {x + z * std::tan(theta), z};
}

inline std::pair<double, double> inverse_shear_transform(double x_sheared, double z, double theta) {
  return {x_sheared - z * std::tan(theta), z};
}

// Field-level shear. With t = tan(theta), u(x, z) = exp(-ik t x - ik t^2 z / 2) v(x + z t, z) where v
// solves the same equation with the boundary on x' = 0. A boundary sample at distance s along the
// inclined line maps to the orthogonal-frame node zeta = s cos(theta).

inline ZGrid sheared_grid(const ZGrid& inclined, double theta) {
  const double c = std::cos(theta);
  return ZGrid(inclined.z_min() * c, inclined.z_max() * c, inclined.intervals());
}

/// exp(i k s sin^2(theta) / (2 cos(theta))) applied to inclined-line samples.
inline BoundaryLine to_sheared_boundary(const BoundaryLine& u0, const PhysicalParams& p) {
  const double c = std::cos(p.theta), sn = std::sin(p.theta);
  std::vector<cplx> v(u0.size());
  for (std::size_t n = 0; n < v.size(); ++n)
    v[n] = u0[n] * std::polar(1.0, 0.5 * p.wavenumber * u0.grid().node(n) * sn * sn / c);
  return {sheared_grid(u0.grid(), p.theta), std::move(v)};
}

inline BoundaryLine from_sheared_boundary(const BoundaryLine& v0, const ZGrid& inclined, const PhysicalParams& p) {
  const double c = std::cos(p.theta), sn = std::sin(p.theta);
  if (v0.size() != inclined.size()) throw std::invalid_argument("from_sheared_boundary: grid mismatch");
  std::vector<cplx> u(v0.size());
  for (std::size_t n = 0; n < u.size(); ++n)
    u[n] = v0[n] * std::polar(1.0, -0.5 * p.wavenumber * inclined.node(n) * sn * sn / c);
  return {inclined, std::move(u)};
}

/// Image-line data (z = 0) in the orthogonal frame: v(x, 0) = exp(i k tan(theta) x) u(x, 0).
inline ImageLine to_sheared_image(const ImageLine& u, const PhysicalParams& p) {
  const double t = std::tan(p.theta);
  std::vector<cplx> v(u.size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = u[s] * std::polar(1.0, p.wavenumber * t * u.grid().node(s));
  return {u.grid(), std::move(v)};
}

}  // namespace ipip
