#pragma once

// Closed-form model amplitudes on the boundary semi-line (and the image line for the Gaussian).

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ipip/core.hpp"

namespace ipip {

/// Tilted Gaussian beam, an exact solution of 2ik u_z + u_xx = 0.
///
/// z_c is the positive-frame distance of the waist behind the image line, i.e. the
/// waist sits at physical z = -z_c on the boundary line x = 0.
struct GaussianBeam {
  double L = 0.0;    ///< Rayleigh length
  double w = 0.0;    ///< waist radius, w^2 k = 2 L
  double z_c = 0.0;
  double xi = 0.0;   ///< transverse spatial frequency

  static GaussianBeam make(double rayleigh_length, double z_c, double xi, const PhysicalParams& p) {
    if (!(rayleigh_length > 0.0)) throw std::domain_error("GaussianBeam: Rayleigh length must be positive");
    return GaussianBeam{rayleigh_length, std::sqrt(2.0 * rayleigh_length / p.wavenumber), z_c, xi};
  }

  /// Field at physical coordinates (x, z).
  cplx field(double x, double z_phys, double k) const {
    const double d = z_phys + z_c;
    const cplx q = w * w + 2.0 * I * d / k;
    const cplx pref = 1.0 / std::sqrt(1.0 + 2.0 * I * d / (k * w * w));
    const double shift = x + xi * d / k;
    return pref * std::exp(-I * xi * x - I * (xi * xi * d / (2.0 * k))) * std::exp(-shift * shift / q);
  }

  /// Transverse derivative du/dx at physical (x, z).
  cplx field_dx(double x, double z_phys, double k) const {
    const double d = z_phys + z_c;
    const cplx q = w * w + 2.0 * I * d / k;
    return field(x, z_phys, k) * (-I * xi - 2.0 * (x + xi * d / k) / q);
  }
};

/// Tilt xi (negative, so the beam walks towards x > 0 on the image line) for which the
/// Gaussian has decayed to `edge_tol` at distance `half_window` from its waist along
/// the boundary line.
inline double contained_tilt(double rayleigh_length, double half_window, const PhysicalParams& p,
                             double edge_tol = 1e-8) {
  if (!(half_window > 0.0) || !(edge_tol > 0.0 && edge_tol < 1.0))
    throw std::domain_error("contained_tilt: need half_window > 0 and 0 < edge_tol < 1");
  const double k = p.wavenumber;
  const double w2 = 2.0 * rayleigh_length / k;
  const cplx q = w2 + 2.0 * I * half_window / k;
  const double pref = 1.0 / std::sqrt(std::abs(1.0 + 2.0 * I * half_window / (k * w2)));
  const double re_inv_q = (1.0 / q).real();
  const double ratio = std::log(pref / edge_tol);
  if (ratio <= 0.0) return 0.0;
  return -(k / half_window) * std::sqrt(ratio / re_inv_q);
}

/// Tilt that puts the image-line footprint of a waist at z_c on the centre of [x_min, x_max].
inline double centered_tilt(double x_min, double x_max, double z_c, const PhysicalParams& p) {
  return -p.wavenumber * 0.5 * (x_min + x_max) / z_c;
}

inline BoundaryLine eval_gaussian_boundary(const GaussianBeam& b, const PhysicalParams& p, const ZGrid& g) {
  std::vector<cplx> v(g.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = b.field(0.0, g.physical(n), p.wavenumber);
  return {g, std::move(v)};
}

/// Analytic du/dx on the boundary line.
inline BoundaryLine eval_gaussian_boundary_dx(const GaussianBeam& b, const PhysicalParams& p, const ZGrid& g) {
  std::vector<cplx> v(g.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = b.field_dx(0.0, g.physical(n), p.wavenumber);
  return {g, std::move(v)};
}

inline ImageLine eval_gaussian_image(const GaussianBeam& b, const PhysicalParams& p, const XGrid& g) {
  std::vector<cplx> v(g.size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = b.field(g.node(s), 0.0, p.wavenumber);
  return {g, std::move(v)};
}

/// exp(iKz)(a^2 - (z - z_c)^2) on |z - z_c| < a, zero elsewhere.
struct ParabolicBeam {
  double a = 0.0;
  double z_c = 0.0;
  double K = 0.0;

  /// period = infinity gives K = 0 (real amplitude).
  static ParabolicBeam from_period(double a, double z_c, double period) {
    if (!(a > 0.0)) throw std::domain_error("ParabolicBeam: semi-length must be positive");
    return {a, z_c, std::isinf(period) ? 0.0 : 2.0 * pi / period};
  }

  double period() const { return K == 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * pi / K; }

  cplx value(double z) const {
    const double r = z - z_c;
    if (!(std::abs(r) < a)) return {};
    return std::exp(I * (K * z)) * (a * a - r * r);
  }

  /// Support strictly inside the grid window.
  bool fits(const ZGrid& g) const { return z_c - a > g.z_min() && z_c + a < g.z_max(); }
};

/// exp(iKz) on |z - z_c| <= a (a node on the jump counts as interior), zero elsewhere.
struct StepBeam {
  double a = 0.0;
  double z_c = 0.0;
  double K = 0.0;

  static StepBeam from_period(double a, double z_c, double period) {
    if (!(a > 0.0)) throw std::domain_error("StepBeam: semi-length must be positive");
    return {a, z_c, std::isinf(period) ? 0.0 : 2.0 * pi / period};
  }

  cplx value(double z) const {
    if (!(std::abs(z - z_c) <= a)) return {};
    return std::exp(I * (K * z));
  }

  bool fits(const ZGrid& g) const { return z_c - a > g.z_min() && z_c + a < g.z_max(); }
};

inline BoundaryLine eval_parabolic_boundary(const ParabolicBeam& b, const ZGrid& g) {
  std::vector<cplx> v(g.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = b.value(g.node(n));
  return {g, std::move(v)};
}

inline BoundaryLine eval_step_boundary(const StepBeam& b, const ZGrid& g) {
  std::vector<cplx> v(g.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = b.value(g.node(n));
  return {g, std::move(v)};
}

}  // namespace ipip
