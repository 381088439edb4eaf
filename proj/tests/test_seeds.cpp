#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bubbles/analyze.hpp"
#include "bubbles/seeds.hpp"

using namespace bubbles;

namespace {

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

int pinned_count(const Cluster& c) {
  int n = 0;
  for (const auto& v : c.vertices)
    if (v.pinned_to_origin) {
      ++n;
      EXPECT_EQ(v.pos, (Point{}));
    }
  return n;
}

}  // namespace

TEST(DoubleBubble, CenterDistanceAndBulge) {
  EXPECT_DOUBLE_EQ((DoubleBubbleSpec{1.0, 1.0}.center_distance()), 1.0);
  EXPECT_NEAR((DoubleBubbleSpec{2.0, 1.0}.center_distance()), std::sqrt(3.0), 1e-15);
  EXPECT_FALSE((DoubleBubbleSpec{1.0, 1.0}.bulge_radius()));
  EXPECT_DOUBLE_EQ(*(DoubleBubbleSpec{2.0, 1.0}.bulge_radius()), 2.0);
  EXPECT_DOUBLE_EQ(*(DoubleBubbleSpec{1.0, 2.0}.bulge_radius()), 2.0);
}

TEST(DoubleBubble, JunctionsOnAllThreeCircles) {
  const DoubleBubbleSpec s{1.5, 1.0};
  const auto g = double_bubble_geometry(s);
  for (Point q : {g.top, g.bottom}) {
    EXPECT_NEAR(distance(q, g.center1), s.r1, 1e-12);
    EXPECT_NEAR(distance(q, g.center2), s.r2, 1e-12);
    ASSERT_TRUE(g.bulge_center);
    EXPECT_NEAR(distance(q, *g.bulge_center), *s.bulge_radius(), 1e-12);
  }
}

TEST(DoubleBubble, MeetsAt120Degrees) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> radius(0.3, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double r1 = radius(rng), r2 = radius(rng);
    const Cluster c = standard_double_bubble({r1, r2, 256}, DoublePlacement::vertex_at_origin, {});
    const auto angles = junction_angles(c);
    ASSERT_EQ(angles.size(), 2u);
    for (const auto& [vid, a] : angles) {
      ASSERT_EQ(a.size(), 3u);
      for (double x : a) EXPECT_NEAR(x, 120.0, 0.5) << "r1 " << r1 << " r2 " << r2;
    }
  }
}

TEST(DoubleBubble, InterfaceBulgesIntoLargerLobe) {
  for (auto [r1, r2] : {std::pair{2.0, 1.0}, std::pair{1.0, 2.0}}) {
    const Cluster c = standard_double_bubble({r1, r2, 16}, DoublePlacement::vertex_at_origin, {});
    const ClusterIndex idx(c);
    // The middle interface is the arc with regions on both sides.
    for (const Arc& a : extract_arcs(c)) {
      if (a.left_region == kExterior || a.right_region == kExterior) continue;
      const auto pts = arc_points(c, idx, a);
      const double chord_x = pts.front().x;
      const double mid_x = pts[pts.size() / 2].x;
      if (r1 > r2)
        EXPECT_LT(mid_x, chord_x - 0.05);
      else
        EXPECT_GT(mid_x, chord_x + 0.05);
    }
  }
}

TEST(DoubleBubble, Placement) {
  const Cluster v = standard_double_bubble({1.0, 1.0, 8}, DoublePlacement::vertex_at_origin, {2.0});
  EXPECT_EQ(pinned_count(v), 1);
  const Cluster m = standard_double_bubble({1.0, 1.0, 8}, DoublePlacement::center_at_origin, {2.0});
  EXPECT_EQ(pinned_count(m), 0);
  // Symmetric about the origin: the equal double bubble's centre is the chord midpoint.
  double sx = 0.0, sy = 0.0;
  for (const auto& p : m.vertices) sx += p.pos.x, sy += p.pos.y;
  EXPECT_NEAR(sx, 0.0, 1e-12);
  EXPECT_NEAR(sy, 0.0, 1e-12);
  const auto a = weighted_areas(m);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(m.regions[i].target_weighted_area, a[i]);
  EXPECT_THROW(standard_double_bubble({0.0, 1.0}, DoublePlacement::vertex_at_origin, {}), Error);
}

TEST(CircleSeed, RadiusForUnitOffset) {
  // Weighted area pi R^2 (|c|^2 + R^2 / 2) = pi / 2 at |c| = 1, p = 2.
  const Cluster c = circle_seed(std::numbers::pi / 2, {1.0, 0.0}, {2.0}, 4096);
  const double want = std::sqrt(std::sqrt(2.0) - 1.0);
  for (const auto& v : c.vertices) EXPECT_NEAR(distance(v.pos, {1.0, 0.0}), want, 1e-5);
  EXPECT_NEAR(weighted_areas(c)[0], std::numbers::pi / 2, 1e-12);
}

TEST(CircleSeed, EuclideanRadius) {
  const Cluster c = circle_seed(std::numbers::pi * 4, {3.0, -1.0}, {}, 4096);
  for (const auto& v : c.vertices) EXPECT_NEAR(distance(v.pos, {3.0, -1.0}), 2.0, 1e-5);
  EXPECT_THROW(circle_seed(-1.0, {}, {}), Error);
}

TEST(Seeds, TotalAreaAndPins) {
  for (double p : {0.0, 1.0, 2.0}) {
    const DensityField d{p};
    const Cluster t = triple_seed({10, 10, 10}, d);
    EXPECT_EQ(pinned_count(t), 1);
    EXPECT_NEAR(total(weighted_areas(t)), 30.0, 1e-9);

    const Cluster ch = chain_seed({10, 10, 10}, d);
    EXPECT_EQ(ch.regions.size(), 3u);
    EXPECT_NEAR(total(weighted_areas(ch)), 30.0, 1e-9);
    bool touches_origin = false;
    for (const auto& v : ch.vertices) touches_origin |= norm(v.pos) < 1e-12;
    EXPECT_TRUE(touches_origin);

    for (CentralEnd end : {CentralEnd::west, CentralEnd::east}) {
      const Cluster q = quadruple_seed({30, 30, 1, 1}, d, end);
      EXPECT_EQ(pinned_count(q), 1);
      EXPECT_NEAR(total(weighted_areas(q)), 62.0, 1e-9);
      EXPECT_EQ(central_arcs(q).size(), 1u);
    }
  }
}

TEST(Seeds, ProjectToTargets) {
  const DensityField d{2.0};
  for (const Cluster& c : {triple_seed({3, 2, 1}, d), chain_seed({1, 2, 1}, d),
                           quadruple_seed({30, 1, 30, 1}, d), quadruple_seed({1, 1, 1, 1}, {0.3}),
                           circle_seed(1.0, {2.0, 1.0}, d)}) {
    const Cluster out = project_to_constraints(c);
    EXPECT_LE(max_area_residual(out, weighted_areas(out)), 1e-9);
    EXPECT_TRUE(validate(out).empty());
  }
}

TEST(Seeds, QuadrupleLabelsClockwise) {
  const Cluster q = quadruple_seed({4, 3, 2, 1}, {});
  ASSERT_EQ(q.regions.size(), 4u);
  const std::vector<std::string> labels{"N", "E", "S", "W"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(q.regions[i].label, labels[i]);
    EXPECT_DOUBLE_EQ(q.regions[i].target_weighted_area, 4.0 - static_cast<double>(i));
  }
  // The central edge runs west to east with N on its left.
  const auto central = central_arcs(q);
  ASSERT_EQ(central.size(), 1u);
  const ClusterIndex idx(q);
  const Point a = q.vertices[idx.v(central[0].first())].pos, b = q.vertices[idx.v(central[0].last())].pos;
  const int north = q.regions[0].id;
  EXPECT_EQ(a.x < b.x ? central[0].left_region : central[0].right_region, north);
}

TEST(Seeds, Errors) {
  EXPECT_THROW(triple_seed({1, 1}, {}), Error);
  EXPECT_THROW(quadruple_seed({1, 1, 1}, {}), Error);
  EXPECT_THROW(chain_seed({1}, {}), Error);
  EXPECT_THROW(triple_seed({1, -1, 1}, {}), Error);
  EXPECT_THROW(triple_seed({1, 1, 1}, {-1.0}), Error);
}
