#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ipip/core.hpp"

namespace ipip::oracle {

using boost::math::quadrature::gauss_kronrod;

inline cplx gk(auto&& f, double a, double b) {
  if (!(b > a)) return {};
  auto re = [&](double t) { return f(t).real(); };
  auto im = [&](double t) { return f(t).imag(); };
  const double r = gauss_kronrod<double, 31>::integrate(re, a, b, 15, 1e-12);
  const double i = gauss_kronrod<double, 31>::integrate(im, a, b, 15, 1e-12);
  return {r, i};
}

/// PV int_{z_0}^{z_N} u(zeta) / ((zeta - z_n) sqrt(zeta)) dzeta for the piecewise-linear
/// interpolant of `u`, by symmetric exclusion [z_n - eps, z_n + eps] and Richardson
/// extrapolation over eps in {1e-3, 1e-4, 1e-5} * tau.
inline cplx pv_row(const ZGrid& g, const std::vector<cplx>& u, std::size_t n) {
  const std::size_t N = g.intervals();
  const double zn = g.node(n);
  auto interp = [&](double z, std::size_t m) {
    const double t = (z - g.node(m)) / g.step();
    return u[m] * (1.0 - t) + u[m + 1] * t;
  };
  auto excluded = [&](double eps) {
    cplx acc{};
    for (std::size_t m = 0; m < N; ++m) {
      const double a = g.node(m), b = g.node(m + 1);
      auto f = [&](double z) { return interp(z, m) / ((z - zn) * std::sqrt(z)); };
      if (m == n) {
        // zeta = z_n + e^t removes the 1/(zeta - z_n) stiffness
        auto h = [&](double t) {
          const double z = zn + std::exp(t);
          return interp(z, m) / std::sqrt(z);
        };
        acc += gk(h, std::log(eps), std::log(b - zn));
      } else if (m + 1 == n) {
        auto h = [&](double t) {
          const double z = zn - std::exp(t);
          return -interp(z, m) / std::sqrt(z);
        };
        acc += gk(h, std::log(eps), std::log(zn - a));
      } else {
        acc += gk(f, a, b);
      }
    }
    return acc;
  };
  const std::array<double, 3> e{1e-3 * g.step(), 1e-4 * g.step(), 1e-5 * g.step()};
  const std::array<cplx, 3> v{excluded(e[0]), excluded(e[1]), excluded(e[2])};
  // I(eps) = P + a eps + b eps^2, eliminate a and b (Neville on eps -> 0)
  const cplx p01 = (v[1] * e[0] - v[0] * e[1]) / (e[0] - e[1]);
  const cplx p12 = (v[2] * e[1] - v[1] * e[2]) / (e[1] - e[2]);
  return (p12 * e[0] - p01 * e[2]) / (e[0] - e[2]);
}

inline std::vector<cplx> random_line(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& x : v) x = {d(rng), d(rng)};
  return v;
}

inline double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  return std::sqrt(num / den);
}

template <class Line>
std::vector<cplx> to_vec(const Line& l) {
  return {l.samples().begin(), l.samples().end()};
}

}  // namespace ipip::oracle
