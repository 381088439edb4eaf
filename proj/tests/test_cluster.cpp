#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bubbles/cluster.hpp"
#include "bubbles/energy.hpp"
#include "bubbles/seeds.hpp"

using namespace bubbles;

namespace {

// Two unit squares sharing the interface x = 1: region 1 on the left,
// region 2 on the right.
Cluster two_squares() {
  Cluster c;
  c.vertices = {{1, {0, 0}}, {2, {1, 0}}, {3, {2, 0}}, {4, {2, 1}}, {5, {1, 1}}, {6, {0, 1}}};
  c.edges = {{1, 1, 2, 1, kExterior}, {2, 2, 3, 2, kExterior}, {3, 3, 4, 2, kExterior}, {4, 4, 5, 2, kExterior},
             {5, 5, 6, 1, kExterior}, {6, 6, 1, 1, kExterior}, {7, 2, 5, 1, 2}};
  c.regions = {{1, 1.0, "L"}, {2, 1.0, "R"}};
  return c;
}

bool has(const std::vector<Violation>& vs, ViolationKind k) {
  for (const auto& v : vs)
    if (v.kind == k) return true;
  return false;
}

}  // namespace

TEST(Validate, SeedsAreValid) {
  const DensityField d{2.0};
  EXPECT_TRUE(validate(two_squares()).empty());
  EXPECT_TRUE(validate(circle_seed(1.0, {1, 0}, d)).empty());
  EXPECT_TRUE(validate(standard_double_bubble({1.0, 0.7, 16}, DoublePlacement::vertex_at_origin, d)).empty());
  EXPECT_TRUE(validate(triple_seed({10, 10, 10}, d)).empty());
  EXPECT_TRUE(validate(chain_seed({10, 10, 10}, d)).empty());
  EXPECT_TRUE(validate(quadruple_seed({1, 2, 3, 4}, d)).empty());
}

TEST(Validate, SameRegionBothSides) {
  Cluster c = two_squares();
  c.edges[6].left_region = 1;
  c.edges[6].right_region = 1;
  EXPECT_TRUE(has(validate(c), ViolationKind::region_mismatch));
}

TEST(Validate, DanglingAndOpen) {
  Cluster c = two_squares();
  c.edges.pop_back();
  const auto vs = validate(c);
  EXPECT_TRUE(has(vs, ViolationKind::open_boundary));

  Cluster d = two_squares();
  d.edges[0].head = 99;
  EXPECT_TRUE(has(validate(d), ViolationKind::dangling_edge));
}

TEST(Validate, ValenceFourOnlyAtOrigin) {
  // Two triangles sharing the vertex at (1, 1).
  Cluster c;
  c.vertices = {{1, {1, 1}}, {2, {2, 1}}, {3, {2, 2}}, {4, {0, 1}}, {5, {0, 0}}};
  c.edges = {{1, 1, 2, 1, kExterior}, {2, 2, 3, 1, kExterior}, {3, 3, 1, 1, kExterior},
             {4, 1, 4, 2, kExterior}, {5, 4, 5, 2, kExterior}, {6, 5, 1, 2, kExterior}};
  c.regions = {{1, 1.0, "A"}, {2, 1.0, "B"}};
  EXPECT_TRUE(has(validate(c), ViolationKind::illegal_valence));
  for (auto& v : c.vertices) v.pos = v.pos - Point{1, 1};
  EXPECT_FALSE(has(validate(c), ViolationKind::illegal_valence));
}

TEST(Validate, BadValues) {
  Cluster c = two_squares();
  c.regions[0].target_weighted_area = -1.0;
  EXPECT_TRUE(has(validate(c), ViolationKind::invalid_value));
  Cluster d = two_squares();
  d.vertices[0].pos.x = NAN;
  EXPECT_TRUE(has(validate(d), ViolationKind::invalid_value));
  Cluster e = two_squares();
  e.vertices[2].pinned_to_origin = true;
  EXPECT_TRUE(has(validate(e), ViolationKind::invalid_value));
}

TEST(Boundary, LoopsAreCounterclockwise) {
  const Cluster c = two_squares();
  const ClusterIndex idx(c);
  for (int r : {1, 2}) {
    const auto loops = region_boundary(c, r);
    ASSERT_EQ(loops.size(), 1u);
    EXPECT_EQ(loops[0].edge_ids.size(), 4u);
    EXPECT_NEAR(loop_weighted_area(loop_points(c, idx, loops[0]), {}), 1.0, 1e-14);
  }
  EXPECT_THROW(region_boundary(c, 7), MissingRegionError);
}

TEST(Arcs, Counts) {
  const DensityField d{1.0};
  EXPECT_EQ(extract_arcs(standard_double_bubble({1.0, 1.0, 8}, DoublePlacement::vertex_at_origin, d)).size(), 3u);
  EXPECT_EQ(extract_arcs(triple_seed({1, 1, 1}, d)).size(), 6u);
  EXPECT_EQ(extract_arcs(quadruple_seed({1, 1, 1, 1}, d)).size(), 9u);
  const auto loop = extract_arcs(circle_seed(1.0, {2, 0}, d));
  ASSERT_EQ(loop.size(), 1u);
  EXPECT_TRUE(loop[0].closed);
  EXPECT_EQ(loop[0].edge_ids.size(), 64u);
}

TEST(Arcs, EdgesPartitioned) {
  const Cluster c = chain_seed({3, 2, 1}, {2.0});
  std::map<int, int> seen;
  for (const auto& a : extract_arcs(c))
    for (int e : a.edge_ids) ++seen[e];
  EXPECT_EQ(seen.size(), c.edges.size());
  for (const auto& [e, n] : seen) EXPECT_EQ(n, 1) << "edge " << e;
}

TEST(Refine, HalvesUntilShortEnough) {
  Cluster c;
  c.vertices = {{1, {0, 0}}, {2, {1, 0}}, {3, {0.5, 1}}};
  c.edges = {{1, 1, 2, 1, kExterior}, {2, 2, 3, 1, kExterior}, {3, 3, 1, 1, kExterior}};
  c.regions = {{1, 0.5, "T"}};
  const Cluster r = refine(c, 0.25);
  int on_base = 0;
  for (const auto& e : r.edges) {
    const ClusterIndex idx(r);
    const Point a = r.vertices[idx.v(e.tail)].pos, b = r.vertices[idx.v(e.head)].pos;
    EXPECT_LE(distance(a, b), 0.25 + 1e-15);
    if (std::abs(a.y) < 1e-15 && std::abs(b.y) < 1e-15) ++on_base;
  }
  EXPECT_EQ(on_base, 4);
  EXPECT_TRUE(validate(r).empty());
  EXPECT_THROW(refine(c, 0.0), Error);
}

TEST(Refine, PreservesMeasures) {
  for (double p : {0.0, 0.5, 2.0}) {
    const Cluster c = triple_seed({3, 2, 1}, {p}, 6);
    const Cluster r = refine(c, diameter(c) / 50);
    EXPECT_GT(r.edges.size(), c.edges.size());
    // Straight subdivision leaves every segment's line integral unchanged.
    const auto a0 = weighted_areas(c), a1 = weighted_areas(r);
    for (std::size_t i = 0; i < a0.size(); ++i) EXPECT_NEAR(a1[i], a0[i], 1e-12 * a0[i]);
    EXPECT_NEAR(weighted_perimeter(r), weighted_perimeter(c), 1e-12 * weighted_perimeter(c));
  }
}

TEST(Collapse, MergesEndpoints) {
  const Cluster c = two_squares();
  const Cluster r = collapse_edge(c, 1);
  EXPECT_EQ(r.vertices.size(), c.vertices.size() - 1);
  EXPECT_EQ(r.edges.size(), c.edges.size() - 1);
  const ClusterIndex idx(r);
  // The valence-3 endpoint survives in place.
  EXPECT_FALSE(idx.vertex.count(1));
  EXPECT_EQ(r.vertices[idx.v(2)].pos, (Point{1, 0}));
  EXPECT_TRUE(validate(r).empty());
}

TEST(Collapse, PinnedSurvivorAtOrigin) {
  Cluster c = two_squares();
  c.vertices[0].pinned_to_origin = true;
  const Cluster r = collapse_edge(c, 1);
  const ClusterIndex idx(r);
  const Vertex& v = r.vertices[idx.v(1)];
  EXPECT_TRUE(v.pinned_to_origin);
  EXPECT_EQ(v.pos, (Point{0, 0}));
}

TEST(Collapse, RefusesParallelEdges) {
  Cluster c;
  c.vertices = {{1, {0, 0}}, {2, {1, 0}}};
  c.edges = {{1, 1, 2, 1, kExterior}, {2, 2, 1, 1, kExterior}};
  c.regions = {{1, 1.0, "A"}};
  EXPECT_THROW(collapse_edge(c, 1), SurgeryError);
}

TEST(Coarsen, KeepsJunctionsAndLoops) {
  const Cluster c = refine(two_squares(), 0.01);
  const Cluster r = coarsen(c, 0.5);
  EXPECT_TRUE(validate(r).empty());
  EXPECT_EQ(extract_arcs(r).size(), 3u);
  EXPECT_LT(r.edges.size(), c.edges.size() / 10);
}

TEST(Connectivity, WarnsOnTwoComponents) {
  Cluster c = two_squares();
  EXPECT_FALSE(connectivity_warning(c));
  Cluster far = circle_seed(1.0, {10, 0}, {});
  for (auto& v : far.vertices) v.id += 100;
  for (auto& e : far.edges) e.id += 100, e.tail += 100, e.head += 100, e.left_region = 3;
  c.vertices.insert(c.vertices.end(), far.vertices.begin(), far.vertices.end());
  c.edges.insert(c.edges.end(), far.edges.begin(), far.edges.end());
  c.regions.push_back({3, 1.0, "C"});
  EXPECT_TRUE(validate(c).empty());
  EXPECT_TRUE(connectivity_warning(c));
}
