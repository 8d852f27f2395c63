#include <gtest/gtest.h>

#include "qdl/geometry.hpp"
#include "qdl/oracle.hpp"
#include "qdl/tracer.hpp"
#include "support.hpp"

using namespace qdl;
namespace t = qdl::testing;

TEST(GridLevel, UnitCircle) {
  const GridLevelSet g = grid_level(RationalMap(Polynomial{0.0, 0.0, 1.0}), 1.0, {-2, 2, -2, 2}, 0.01);
  EXPECT_EQ(g.component_count, 1);
  ASSERT_EQ(g.polylines.size(), 1u);
  EXPECT_TRUE(g.closed[0]);
  for (cplx z : g.polylines[0]) EXPECT_NEAR(std::abs(z), 1.0, 1e-4);
}

TEST(GridLevel, ComponentCounts) {
  EXPECT_EQ(grid_level(t::fig1_connected(), 0.1, {-3, 3, -3, 3}, 0.01).component_count, 2);
  EXPECT_EQ(grid_level(RationalMap(t::quartic()), 0.5, {-3, 3, -3, 3}, 0.01).component_count, 4);
}

TEST(GridLevel, VerticesLieOnTheLevel) {
  const RationalMap r(t::quartic());
  const double pitch = 0.01;
  const GridLevelSet g = grid_level(r, 0.5, {-3, 3, -3, 3}, pitch);
  for (const auto& line : g.polylines)
    for (cplx z : line) {
      const cplx d = r.p().derivative()(z);
      // |r| - c is off by at most the interpolation error of a smooth function over one cell.
      EXPECT_LE(std::abs(std::abs(r(z)) - 0.5), 0.5 * pitch * pitch * (1.0 + std::abs(d) * 10.0));
    }
}

TEST(GridLevel, DefaultPitchIsWidthOver1024) {
  const GridLevelSet g = grid_level(RationalMap(Polynomial{0.0, 0.0, 1.0}), 1.0, {-2, 2, -2, 2});
  EXPECT_DOUBLE_EQ(g.pitch, 4.0 / 1024);
  EXPECT_EQ(g.component_count, 1);
}

TEST(GridLevel, HalvingPitchKeepsComponentCount) {
  const std::vector<std::pair<RationalMap, double>> cases{{RationalMap(t::quartic()), 0.5},
                                                          {RationalMap(t::quartic()), 3.0},
                                                          {t::fig1_connected(), 10.0},
                                                          {t::fig1_disconnected(), 2.0}};
  for (const auto& [r, c] : cases) {
    const Window w{-3, 3, -3, 3};
    EXPECT_EQ(grid_level(r, c, w, 0.02).component_count, grid_level(r, c, w, 0.01).component_count) << c;
  }
}

TEST(Winding, Examples) {
  const std::vector<cplx> square{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  EXPECT_EQ(winding_number(square, 0.0), 1);
  EXPECT_EQ(winding_number(square, 5.0), 0);
  std::vector<cplx> reversed(square.rbegin(), square.rend());
  EXPECT_EQ(winding_number(reversed, 0.0), -1);
  EXPECT_THROW(winding_number(square, cplx(1.0, 0.0)), NumericError);
}

TEST(Winding, FigureEightLobe) {
  const QuadraticDifferential qd = build(RationalMap(t::z2_minus_1()));
  const Tracer tracer(qd);
  for (int j = 0; j < 4; j += 2) {
    const Trajectory lobe = tracer.trace_critical({0, j});
    const int w1 = winding_number(lobe.points, 1.0), wm1 = winding_number(lobe.points, -1.0);
    EXPECT_EQ(std::abs(w1) + std::abs(wm1), 1);
  }
}

TEST(Hausdorff, TracedCurvesMatchOracle) {
  const std::vector<std::pair<RationalMap, double>> cases{{RationalMap(t::quartic()), 0.5},
                                                          {RationalMap(t::quartic()), 3.0},
                                                          {RationalMap(t::z3_minus_3z()), 1.0},
                                                          {t::fig1_connected(), 0.3}};
  for (const auto& [r, c] : cases) {
    const QuadraticDifferential qd = build(r);
    const Window w{-3, 3, -3, 3};
    const double pitch = 0.005;
    const GridLevelSet g = grid_level(r, c, w, pitch);
    std::vector<std::vector<cplx>> traced;
    for (const Trajectory& tr : Tracer(qd).level_set(c, w)) traced.push_back(tr.points);
    EXPECT_EQ(static_cast<int>(traced.size()), g.component_count);
    EXPECT_LE(hausdorff(traced, g.polylines), 2 * pitch) << "level " << c;
  }
}

TEST(Hausdorff, IsSymmetricAndZeroOnIdenticalSets) {
  const std::vector<std::vector<cplx>> a{{0.0, 1.0, cplx(1, 1)}}, b{{0.0, 1.0, cplx(1, 1.5)}};
  EXPECT_EQ(hausdorff(a, a), 0.0);
  EXPECT_DOUBLE_EQ(hausdorff(a, b), hausdorff(b, a));
  EXPECT_GT(hausdorff(a, b), 0.0);
}
