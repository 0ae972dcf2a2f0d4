#pragma once

// Direct problem: trapezoidal quadrature of the Fresnel-type boundary-to-field kernels.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipip/core.hpp"

namespace ipip {

namespace detail {

inline double trapezoid_weight(std::size_t i, std::size_t count, double step) {
  return (i == 0 || i + 1 == count) ? 0.5 * step : step;
}

}  // namespace detail

struct PropagationRequest {
  BoundaryLine boundary;
  PhysicalParams params;
  XGrid target;
};

/// Field on the image line z = 0 at transverse position x > 0 from boundary data on x = 0.
inline cplx fresnel_point(const BoundaryLine& u0, const PhysicalParams& p, double x) {
  if (!(x > 0.0)) throw std::domain_error("fresnel_point: target node must satisfy x > 0, got " + std::to_string(x));
  const double k = p.wavenumber;
  const ZGrid& g = u0.grid();
  const std::size_t n_nodes = g.size();
  const double half_kx2 = 0.5 * k * x * x;
  cplx acc{};
  for (std::size_t n = 0; n < n_nodes; ++n) {
    const double z = g.node(n);
    const double wgt = detail::trapezoid_weight(n, n_nodes, g.step()) / (z * std::sqrt(z));
    acc += wgt * u0[n] * std::polar(1.0, half_kx2 / z);
  }
  return x * std::sqrt(k / (2.0 * pi * I)) * acc;
}

/// Propagate boundary data to every node of an image-line grid. Each node is computed
/// independently, so the result does not depend on evaluation order.
inline ImageLine fresnel_propagate(const BoundaryLine& u0, const PhysicalParams& p, const XGrid& target) {
  if (!(target.x_min() > 0.0))
    throw std::domain_error("fresnel_propagate: every target node must satisfy x > 0 (x_min = " +
                            std::to_string(target.x_min()) + ")");
  std::vector<cplx> out(target.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = fresnel_point(u0, p, target.node(s));
  return {target, std::move(out)};
}

inline ImageLine fresnel_propagate(const PropagationRequest& req) {
  return fresnel_propagate(req.boundary, req.params, req.target);
}

/// Field at physical point (x, z) radiated by data on the inclined boundary line, which
/// makes angle theta with the z axis. The boundary grid parametrizes distance s along the
/// line; sample s sits at (s sin(theta), -s cos(theta)).
inline cplx inclined_propagate(const BoundaryLine& u0, const PhysicalParams& p, double x, double z) {
  const double c = std::cos(p.theta);
  const double sn = std::sin(p.theta);
  const double lead = x * c + z * sn;
  if (!(lead > 0.0)) throw std::domain_error("inclined_propagate: field point lies outside x > -z tan(theta)");
  const double k = p.wavenumber;
  const ZGrid& g = u0.grid();
  const std::size_t n_nodes = g.size();
  cplx acc{};
  for (std::size_t n = 0; n < n_nodes; ++n) {
    const double s = g.node(n);
    const double dz = z + s * c;
    if (!(dz > 0.0)) throw std::domain_error("inclined_propagate: boundary sample not behind the field point");
    const double dx = x - s * sn;
    const double wgt = detail::trapezoid_weight(n, n_nodes, g.step()) / (dz * std::sqrt(dz));
    acc += wgt * u0[n] * std::polar(1.0, 0.5 * k * dx * dx / dz);
  }
  return lead * std::sqrt(k / (2.0 * pi * I)) * acc;
}

}  // namespace ipip
