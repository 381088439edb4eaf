#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bubbles/analyze.hpp"
#include "bubbles/seeds.hpp"

using namespace bubbles;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed polygon on the circle of radius r centred at (r cos t, r sin t), so
// that it passes through the origin (which is not a vertex).
Cluster circle_through_origin(double r, double t, double p, int n = 720, double phase = 0.5) {
  Cluster c;
  c.density.p = p;
  const Point center{r * std::cos(t), r * std::sin(t)};
  for (int i = 0; i < n; ++i) {
    const double s = 2 * kPi * (i + phase) / n + t + kPi;
    c.vertices.push_back({i + 1, center + Point{std::cos(s), std::sin(s)} * r, false});
    c.edges.push_back({i + 1, i + 1, (i + 1) % n + 1, 1, kExterior});
  }
  c.regions = {{1, 1.0, "A"}};
  return c;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST(Angles, SumTo360) {
  for (const Cluster& c : {triple_seed({3, 2, 1}, {1.0}), quadruple_seed({1, 2, 3, 4}, {2.0}),
                           chain_seed({1, 2}, {0.5})}) {
    const auto angles = junction_angles(c);
    EXPECT_FALSE(angles.empty());
    for (const auto& [vid, a] : angles) {
      EXPECT_NEAR(sum(a), 360.0, 1e-9);
      for (double x : a) EXPECT_GT(x, 0.0);
    }
  }
}

TEST(Angles, EuclideanDoubleBubbleIsRegular) {
  const Cluster c = standard_double_bubble({1.0, 0.6, 256}, DoublePlacement::center_at_origin, {});
  EXPECT_TRUE(angle_violations(c, junction_angles(c), 0.5).empty());
  const auto r = regularity_report(c);
  EXPECT_TRUE(r.passed());
  for (const auto& a : r.arcs) EXPECT_LT(a.constancy_defect, 1e-2);
}

TEST(Angles, BentJunctionIsReported) {
  Cluster c = standard_double_bubble({1.0, 1.0, 64}, DoublePlacement::center_at_origin, {});
  const auto inc = incidence(c);
  int junction = 0;
  for (const auto& [vid, e] : inc)
    if (e.size() == 3) junction = vid;
  // Drag a neighbour of the junction sideways.
  const ClusterIndex idx(c);
  const int nb = other_end(c.edges[idx.e(inc.at(junction)[0])], junction);
  c.vertices[idx.v(nb)].pos += Point{0.02, 0.02};
  const auto v = angle_violations(c, junction_angles(c), 0.5);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].vertex_id, junction);
  EXPECT_GT(v[0].worst_deviation, 0.5);
}

TEST(Angles, OriginExemptOnlyWithPositiveDensity) {
  Cluster c = triple_seed({3, 2, 1}, {2.0});
  const Vertex* center = nullptr;
  for (const auto& v : c.vertices)
    if (v.pinned_to_origin) center = &v;
  ASSERT_NE(center, nullptr);
  EXPECT_TRUE(angle_exempt(c, *center));
  c.density.p = 0.0;
  EXPECT_FALSE(angle_exempt(c, *center));
}

TEST(Angles, VerticesWithinAFewSpacingsOfTheOriginAreExempt) {
  const Cluster seed = triple_seed({1, 1, 1}, {2.0}, 16);
  const auto inc = incidence(seed);
  const ClusterIndex idx(seed);
  int center = 0;
  for (const auto& v : seed.vertices)
    if (v.pinned_to_origin) center = v.id;
  double spoke = 0.0;
  for (int eid : inc.at(center)) {
    const Edge& e = seed.edges[idx.e(eid)];
    spoke = std::max(spoke, norm(seed.vertices[idx.v(other_end(e, center))].pos));
  }
  // Junction moved two spoke edges away from the origin.
  Cluster c = translate_cluster(seed, {2.0 * spoke, 0.0});
  for (auto& v : c.vertices) v.pinned_to_origin = false;
  const Vertex& j = c.vertices[idx.v(center)];
  EXPECT_TRUE(angle_exempt(c, j));
  EXPECT_FALSE(angle_exempt(c, j, 1.0));
  EXPECT_FALSE(angle_exempt(c, j, 0.0));
}

TEST(ArcRegularity, GeneralizedCurvatureOfCircleThroughOrigin) {
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    for (double r : {0.5, 2.0}) {
      const Cluster c = circle_through_origin(r, 0.7, p);
      const auto arcs = arc_regularity(c);
      ASSERT_EQ(arcs.size(), 1u);
      const ArcReport& a = arcs[0];
      ASSERT_FALSE(a.error);
      EXPECT_NEAR(a.kappa_mean, (p + 2) / (2 * r), 1e-6 * (p + 2) / (2 * r));
      EXPECT_LT(a.constancy_defect, 1e-6);
      EXPECT_TRUE(a.circular_through_origin);
      EXPECT_NEAR(a.fit.radius, r, 1e-9 * r);
    }
  }
}

TEST(ArcRegularity, SamplesBesideTheOriginAreSkipped) {
  // One vertex lies 1e-6 of a spacing away from the origin, nudged 1e-9 off
  // the circle.
  Cluster c = circle_through_origin(1.0, 0.7, 2.0, 720, 1e-6 - 1.0);
  c.vertices[1].pos += Point{std::cos(0.7), std::sin(0.7)} * 1e-9;
  Tolerances raw;
  raw.origin_spacings = 0.0;
  EXPECT_GT(arc_regularity(c, raw)[0].constancy_defect, 1e-2);
  const auto a = arc_regularity(c)[0];
  EXPECT_LT(a.constancy_defect, 1e-4);
  EXPECT_NEAR(a.kappa_mean, 2.0, 1e-4);
}

TEST(ArcRegularity, OffsetCircleIsNotConstant) {
  Cluster c = circle_through_origin(1.0, 0.0, 2.0);
  for (auto& v : c.vertices) v.pos += Point{1.0, 0.0};
  const auto a = arc_regularity(c)[0];
  EXPECT_FALSE(a.circular_through_origin);
  EXPECT_GT(a.constancy_defect, 1e-2);
  EXPECT_FALSE(regularity_report(c).passed());
}

TEST(ArcRegularity, RadialSegmentsAreStraightThroughOrigin) {
  const Cluster c = triple_seed({1, 1, 1}, {2.0}, 16);
  int spokes = 0;
  for (const auto& a : arc_regularity(c)) {
    if (a.left_region == kExterior || a.right_region == kExterior) continue;
    ++spokes;
    EXPECT_TRUE(a.straight);
    EXPECT_LT(a.through_origin_residual, 1e-12);
    EXPECT_TRUE(a.circular_through_origin);
  }
  EXPECT_EQ(spokes, 3);
}

TEST(Compare, AntisymmetricAndPicksMinimum) {
  const std::vector<RunSummary> runs{{"a", 2.0, 10.5, {1, 2}}, {"b", 2.0, 10.25, {2, 1}}, {"c", 2.0, 11.0, {1, 2}}};
  const ComparisonTable t = compare(runs);
  EXPECT_EQ(t.winner, 1u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(t.differences[i][i], 0.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(t.differences[i][j], -t.differences[j][i]);
  }
  EXPECT_DOUBLE_EQ(t.differences[0][1], 0.25);
}

TEST(Compare, RejectsIncomparableRuns) {
  EXPECT_THROW(compare({{"a", 2.0, 1.0, {1}}}), IncomparableRunsError);
  EXPECT_THROW(compare({{"a", 2.0, 1.0, {1, 2}}, {"b", 1.0, 1.0, {1, 2}}}), IncomparableRunsError);
  EXPECT_THROW(compare({{"a", 2.0, 1.0, {1, 2}}, {"b", 2.0, 1.0, {1, 3}}}), IncomparableRunsError);
  EXPECT_THROW(compare({{"a", 2.0, 1.0, {1, 2}}, {"b", 2.0, 1.0, {1, 2, 3}}}), IncomparableRunsError);
}

TEST(Shape, HausdorffOfTranslate) {
  const Cluster a = standard_double_bubble({1.0, 1.0, 32}, DoublePlacement::center_at_origin, {});
  EXPECT_LT(hausdorff_distance(a, a), 1e-14);
  EXPECT_NEAR(hausdorff_distance(a, translate_cluster(a, {0.1, 0.0})), 0.1, 1e-12);
}

TEST(Shape, JunctionAlignmentUndoesRotation) {
  const Cluster a = standard_double_bubble({1.0, 0.8, 32}, DoublePlacement::vertex_at_origin, {2.0});
  Cluster b = a;
  for (auto& v : b.vertices) v.pos = rotate(v.pos, 0.9);
  EXPECT_GT(hausdorff_distance(a, b), 0.1);
  EXPECT_LT(junction_aligned_hausdorff(a, b), 1e-12);
}

TEST(Topology, QuadrupleSummaries) {
  const Cluster q = quadruple_seed({1, 1, 1, 1}, {1.0});
  EXPECT_EQ(inner_junctions(q).size(), 2u);
  EXPECT_EQ(central_arcs(q).size(), 1u);
  EXPECT_EQ(origin_valence(q), 3u);
  EXPECT_EQ(inner_junctions(triple_seed({1, 1, 1}, {})).size(), 1u);
  EXPECT_TRUE(central_arcs(triple_seed({1, 1, 1}, {})).empty());
  EXPECT_EQ(origin_valence(circle_seed(1.0, {5, 0}, {})), 0u);
}
