#include <gtest/gtest.h>

#include <random>

#include "ipip/core.hpp"

using namespace ipip;

TEST(PhysicalParams, WavenumberTimesWavelengthIsTwoPi) {
  for (double lam : {0.01, 0.5, 1.0, 3.7}) {
    const auto p = PhysicalParams::from_wavelength(lam);
    EXPECT_NEAR(p.wavenumber * p.wavelength, 2 * pi, 4 * std::numeric_limits<double>::epsilon() * 2 * pi);
  }
  EXPECT_THROW(PhysicalParams::from_wavelength(0.0), std::domain_error);
  EXPECT_THROW(PhysicalParams::from_wavelength(1.0, pi / 2), std::domain_error);
}

TEST(ZGrid, FigureOneStep) {
  const auto g = make_zgrid(90, 100, 2514);
  EXPECT_NEAR(g.step(), 0.0039777, 5e-8);
  EXPECT_EQ(g.size(), 2515u);
  EXPECT_DOUBLE_EQ(g.node(0), 90.0);
  EXPECT_NEAR(g.node(2514), 100.0, 1e-12);
}

TEST(ZGrid, UnitStepNodes) {
  const auto g = make_zgrid(90, 100, 10);
  for (std::size_t n = 0; n <= 10; ++n) EXPECT_DOUBLE_EQ(g.node(n), 90.0 + double(n));
  EXPECT_DOUBLE_EQ(g.physical(3), -93.0);
}

TEST(ZGrid, RejectsBadInput) {
  EXPECT_THROW(make_zgrid(1, 2, 1), std::domain_error);
  EXPECT_THROW(make_zgrid(0, 2, 10), std::domain_error);
  EXPECT_THROW(make_zgrid(-1, 2, 10), std::domain_error);
  EXPECT_THROW(make_zgrid(3, 2, 10), std::domain_error);
}

TEST(XGrid, FigureOneStep) {
  const auto g = make_xgrid(2.8284, 28.284, 2828);
  EXPECT_NEAR(g.step(), 0.0090013, 5e-8);
}

TEST(XGrid, SmallGridAndErrors) {
  const auto g = make_xgrid(0, 1, 2);
  EXPECT_DOUBLE_EQ(g.node(0), 0.0);
  EXPECT_DOUBLE_EQ(g.node(1), 0.5);
  EXPECT_DOUBLE_EQ(g.node(2), 1.0);
  EXPECT_THROW(make_xgrid(5, 4, 10), std::domain_error);
  EXPECT_THROW(make_xgrid(-1, 4, 10), std::domain_error);
  EXPECT_THROW(make_xgrid(0, 4, 1), std::domain_error);
}

TEST(Grids, NodesStrictlyIncreasingAndRecomputable) {
  const auto g = make_zgrid(0.25, 7.5, 997);
  const auto nodes = g.nodes();
  for (std::size_t n = 1; n < nodes.size(); ++n) {
    EXPECT_GT(nodes[n], nodes[n - 1]);
    EXPECT_EQ(nodes[n], g.z_min() + double(n) * g.step());
  }
  EXPECT_GT(nodes.front(), 0.0);
}

TEST(ComplexLine, ValidatesLengthAndFiniteness) {
  const auto g = make_zgrid(1, 2, 4);
  EXPECT_NO_THROW(BoundaryLine(g, std::vector<cplx>(5)));
  EXPECT_THROW(BoundaryLine(g, std::vector<cplx>(4)), std::invalid_argument);
  std::vector<cplx> bad(5);
  bad[2] = {std::numeric_limits<double>::quiet_NaN(), 0};
  EXPECT_THROW(BoundaryLine(g, bad), std::invalid_argument);
  bad[2] = {0, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(BoundaryLine(g, bad), std::invalid_argument);
}

TEST(Regularization, AlphaValues) {
  EXPECT_EQ(Regularization{}.alpha(), cplx(1, 0));
  EXPECT_EQ((Regularization{RegularizationMode::phase, 0.0}.alpha()), cplx(1, 0));
  EXPECT_EQ((Regularization{RegularizationMode::shift, 0.0}.alpha()), cplx(1, 0));
  const cplx a = Regularization{RegularizationMode::phase, 0.1}.alpha();
  EXPECT_NEAR(std::abs(a - std::exp(cplx(0, 0.1))), 0.0, 1e-16);
  EXPECT_EQ((Regularization{RegularizationMode::shift, 0.01}.alpha()), cplx(1.01, 0));
}

TEST(Shear, Examples) {
  auto [x1, z1] = shear_transform(1, 2, 0);
  EXPECT_EQ(x1, 1.0);
  EXPECT_EQ(z1, 2.0);
  auto [x2, z2] = shear_transform(0, 1, pi / 4);
  EXPECT_NEAR(x2, 1.0, 1e-15);
  EXPECT_EQ(z2, 1.0);
}

TEST(Shear, RoundTripWithinTwoUlp) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dx(-100, 100), dth(-1.5, 1.5);
  int bad = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    const double x = dx(rng), z = dx(rng), th = dth(rng);
    auto [xs, zs] = shear_transform(x, z, th);
    auto [xb, zb] = inverse_shear_transform(xs, zs, th);
    const double ulp = std::nextafter(std::max(std::abs(x), std::abs(xs)), INFINITY) - std::max(std::abs(x), std::abs(xs));
    if (std::abs(xb - x) > 2 * ulp || zb != z) ++bad;
  }
  EXPECT_EQ(bad, 0);
}
