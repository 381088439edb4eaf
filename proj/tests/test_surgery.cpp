#include <gtest/gtest.h>

#include "bubbles/surgery.hpp"

using namespace bubbles;

namespace {

// Four unit squares around a valence-4 vertex at `c`. Spoke edges 1..4 point
// east, north, west, south; regions 1..4 are the NE, NW, SW, SE quadrants.
Cluster cross(Point c, double p = 0.0) {
  Cluster k;
  k.density.p = p;
  auto at = [&](double x, double y) { return c + Point{x, y}; };
  k.vertices = {{1, at(0, 0)},  {2, at(1, 0)},   {3, at(0, 1)},  {4, at(-1, 0)}, {5, at(0, -1)},
                {6, at(1, 1)},  {7, at(-1, 1)},  {8, at(-1, -1)}, {9, at(1, -1)}};
  k.edges = {{1, 1, 2, 1, 4},         {2, 1, 3, 2, 1},         {3, 1, 4, 3, 2},         {4, 1, 5, 4, 3},
             {5, 2, 6, 1, kExterior}, {6, 6, 3, 1, kExterior}, {7, 3, 7, 2, kExterior}, {8, 7, 4, 2, kExterior},
             {9, 4, 8, 3, kExterior}, {10, 8, 5, 3, kExterior}, {11, 5, 9, 4, kExterior}, {12, 9, 2, 4, kExterior}};
  k.regions = {{1, 1.0, "NE"}, {2, 1.0, "NW"}, {3, 1.0, "SW"}, {4, 1.0, "SE"}};
  return k;
}

std::pair<int, int> ends(const Cluster& c, int edge_id) {
  const Edge& e = c.edges[ClusterIndex(c).e(edge_id)];
  return {e.tail, e.head};
}

}  // namespace

TEST(Pop, CrossFixtureIsValidOffOrigin) {
  EXPECT_TRUE(validate(cross({0, 0})).empty());
  EXPECT_FALSE(validate(cross({2, 2})).empty());
}

TEST(Pop, SymmetricCrossUsesTieBreak) {
  const Cluster c = cross({2, 2});
  const Cluster out = pop_vertex(c, 1);
  EXPECT_TRUE(validate(out).empty()) << describe(validate(out));
  EXPECT_EQ(out.vertices.size(), c.vertices.size() + 1);
  EXPECT_EQ(out.edges.size(), c.edges.size() + 1);
  // Edge 1 (lowest id) stays with its lower-id neighbour, edge 2.
  const int v1 = ends(out, 1).first, v2 = ends(out, 2).first, v3 = ends(out, 3).first, v4 = ends(out, 4).first;
  EXPECT_EQ(v1, v2);
  EXPECT_EQ(v3, v4);
  EXPECT_NE(v1, v3);
  const auto inc = incidence(out);
  EXPECT_EQ(inc.at(v1).size(), 3u);
  EXPECT_EQ(inc.at(v3).size(), 3u);
  // The new edge separates NW from SE.
  const Edge& added = out.edges.back();
  EXPECT_TRUE((added.left_region == 2 && added.right_region == 4) || (added.left_region == 4 && added.right_region == 2));
}

TEST(Pop, NewEdgeIsShort) {
  const Cluster out = pop_vertex(cross({2, 2}, 1.0), 1);
  const Edge& added = out.edges.back();
  const ClusterIndex idx(out);
  const double len = distance(out.vertices[idx.v(added.tail)].pos, out.vertices[idx.v(added.head)].pos);
  EXPECT_GT(len, 0.0);
  EXPECT_LT(len, 1e-3);
  const auto a0 = weighted_areas(cross({2, 2}, 1.0)), a1 = weighted_areas(out);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a1[i], a0[i], 1e-3 * a0[i]);
}

TEST(Pop, Errors) {
  EXPECT_THROW(pop_vertex(cross({0, 0}), 1), SurgeryError);
  EXPECT_THROW(pop_vertex(cross({2, 2}), 2), SurgeryError);
  EXPECT_THROW(pop_vertex(cross({2, 2}), 42), SurgeryError);
}
