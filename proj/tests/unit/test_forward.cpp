#include <gtest/gtest.h>

#include "ipip/forward.hpp"
#include "ipip/models.hpp"
#include "oracle.hpp"

using namespace ipip;

namespace {

const PhysicalParams kFig = PhysicalParams::from_wavelength(0.01);

BoundaryLine smooth_line(const ZGrid& g) {
  std::vector<cplx> v(g.size());
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double z = g.node(n);
    v[n] = std::exp(-0.05 * (z - 95) * (z - 95)) * std::exp(cplx(0, 3.0 * z));
  }
  return {g, std::move(v)};
}

}  // namespace

TEST(Fresnel, ZeroAndScaling) {
  const auto g = make_zgrid(90, 100, 200);
  const auto x = make_xgrid(2, 20, 50);
  const auto zero = fresnel_propagate(BoundaryLine(g), kFig, x);
  for (const auto& v : zero.samples()) EXPECT_EQ(v, cplx(0, 0));
  const auto u = smooth_line(g);
  std::vector<cplx> twice(u.samples().begin(), u.samples().end());
  for (auto& v : twice) v *= 2.0;
  const auto a = fresnel_propagate(u, kFig, x);
  const auto b = fresnel_propagate(BoundaryLine(g, twice), kFig, x);
  for (std::size_t s = 0; s < a.size(); ++s) EXPECT_EQ(b[s], 2.0 * a[s]);
}

TEST(Fresnel, Linearity) {
  const auto g = make_zgrid(90, 100, 300);
  const auto x = make_xgrid(1, 25, 80);
  const auto u = oracle::random_line(g.size(), 1), v = oracle::random_line(g.size(), 2);
  const cplx a(0.3, -1.7), b(-2.1, 0.4);
  std::vector<cplx> w(u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = a * u[i] + b * v[i];
  const auto fu = fresnel_propagate(BoundaryLine(g, u), kFig, x);
  const auto fv = fresnel_propagate(BoundaryLine(g, v), kFig, x);
  const auto fw = fresnel_propagate(BoundaryLine(g, w), kFig, x);
  std::vector<cplx> comb(fu.size());
  for (std::size_t s = 0; s < comb.size(); ++s) comb[s] = a * fu[s] + b * fv[s];
  EXPECT_LT(oracle::rel_l2(oracle::to_vec(fw), comb), 1e-12);
}

TEST(Fresnel, RejectsNonPositiveTargets) {
  const auto g = make_zgrid(90, 100, 20);
  EXPECT_THROW(fresnel_propagate(BoundaryLine(g), kFig, make_xgrid(0, 1, 4)), std::domain_error);
  EXPECT_THROW(fresnel_point(BoundaryLine(g), kFig, -1.0), std::domain_error);
}

TEST(Fresnel, GaussianMatchesAnalyticImage) {
  const auto g = make_zgrid(90, 100, 2514);
  const auto x = make_xgrid(2.8284, 28.284, 2828);
  const auto b = GaussianBeam::make(20, 95, contained_tilt(20, 5, kFig), kFig);
  const auto img = fresnel_propagate(eval_gaussian_boundary(b, kFig, g), kFig, x);
  const auto exact = eval_gaussian_image(b, kFig, x);
  EXPECT_LT(oracle::rel_l2(oracle::to_vec(img), oracle::to_vec(exact)), 1e-3);
}

TEST(Fresnel, TrapezoidSecondOrderUnderRefinement) {
  // smooth data, non-zero at the window ends: the error ratio under halving tends to 4
  const auto x = make_xgrid(5, 15, 20);
  auto run = [&](std::size_t N) { return oracle::to_vec(fresnel_propagate(smooth_line(make_zgrid(90, 100, N)), kFig, x)); };
  const auto ref = run(64000);
  const double e1 = oracle::rel_l2(run(1000), ref);
  const double e2 = oracle::rel_l2(run(2000), ref);
  EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(Inclined, ReducesToFresnelAtZeroAngle) {
  const auto g = make_zgrid(90, 100, 400);
  const auto u = smooth_line(g);
  for (double x : {1.0, 7.5, 20.0}) EXPECT_EQ(inclined_propagate(u, kFig, x, 0.0), fresnel_point(u, kFig, x));
}

TEST(Inclined, ContinuousAtZeroAngle) {
  // the first-order change is about k x theta, so 1e-6 agreement needs k x theta well below 1e-6
  const auto g = make_zgrid(90, 100, 400);
  const auto u = smooth_line(g);
  const auto p0 = PhysicalParams::from_wavelength(1.0), p1 = PhysicalParams::from_wavelength(1.0, 1e-8);
  for (double x : {0.5, 1.0, 5.0}) {
    const cplx a = inclined_propagate(u, p0, x, 0.0), b = inclined_propagate(u, p1, x, 0.0);
    EXPECT_LT(std::abs(a - b), 1e-6 * std::abs(a));
  }
  // at the short wavelength the deviation stays within the first-order bound
  const auto tiny = PhysicalParams::from_wavelength(0.01, 1e-8);
  for (double x : {1.0, 7.5, 20.0}) {
    const cplx a = inclined_propagate(u, kFig, x, 0.0), b = inclined_propagate(u, tiny, x, 0.0);
    EXPECT_LT(std::abs(a - b), 2.0 * kFig.wavenumber * x * 1e-8 * std::abs(a));
  }
}

TEST(Inclined, ZeroData) {
  const auto g = make_zgrid(90, 100, 40);
  const auto p = PhysicalParams::from_wavelength(0.01, 0.1);
  EXPECT_EQ(inclined_propagate(BoundaryLine(g), p, 5.0, 0.0), cplx(0, 0));
}

TEST(Inclined, EqualsShearedOrthogonalPropagation) {
  const double theta = 0.1;
  const auto p = PhysicalParams::from_wavelength(0.01, theta);
  const double k = p.wavenumber, c = std::cos(theta), sn = std::sin(theta), t = std::tan(theta);
  const auto gs = make_zgrid(90, 100, 2000);
  const auto u = smooth_line(gs);
  // sheared frame: boundary at x' = 0, zeta = s cos(theta), Galilean phase removed
  const ZGrid gz(gs.z_min() * c, gs.z_max() * c, gs.intervals());
  std::vector<cplx> ut(gz.size());
  for (std::size_t n = 0; n < ut.size(); ++n) {
    const double s = gs.node(n), xb = s * sn, zb = -s * c;
    ut[n] = u[n] * std::exp(I * (k * t * xb + 0.5 * k * t * t * zb));
  }
  const BoundaryLine sheared(gz, ut);
  for (double x : {3.0, 9.0, 14.0, 22.0}) {
    const cplx direct = inclined_propagate(u, p, x, 0.0);
    const cplx via = std::exp(-I * (k * t * x)) * fresnel_point(sheared, kFig, x);
    EXPECT_LT(std::abs(direct - via), 1e-9 * std::abs(direct)) << "x=" << x;
  }
}

TEST(Inclined, DomainChecks) {
  const auto g = make_zgrid(90, 100, 40);
  const auto p = PhysicalParams::from_wavelength(0.01, 0.3);
  EXPECT_THROW(inclined_propagate(BoundaryLine(g), p, -50.0, 0.0), std::domain_error);
  EXPECT_THROW(inclined_propagate(BoundaryLine(g), p, 50.0, -95.0), std::domain_error);
}

TEST(Inclined, ShearHelpersMatchDirectEvaluation) {
  const auto p = PhysicalParams::from_wavelength(0.01, -0.2);
  const auto gs = make_zgrid(90, 100, 1500);
  const auto u = smooth_line(gs);
  const auto v = to_sheared_boundary(u, p);
  const auto back = from_sheared_boundary(v, gs, p);
  for (std::size_t n = 0; n < u.size(); ++n) EXPECT_LT(std::abs(back[n] - u[n]), 1e-14);
  const auto x = make_xgrid(2, 20, 6);
  std::vector<cplx> direct(x.size());
  for (std::size_t s = 0; s < x.size(); ++s) direct[s] = inclined_propagate(u, p, x.node(s), 0.0);
  // v(x, 0) = exp(i k tan(theta) x) u(x, 0)
  const auto via = fresnel_propagate(v, PhysicalParams::from_wavelength(0.01), x);
  const auto direct_sheared = to_sheared_image(ImageLine(x, direct), p);
  EXPECT_LT(oracle::rel_l2(oracle::to_vec(via), oracle::to_vec(direct_sheared)), 1e-9);
}
