#pragma once

// Whole-cluster functionals: weighted perimeter of the union of boundaries,
// weighted area per region, their gradients, Newton projection onto the area
// constraints, and the constraint-projected perimeter gradient.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bubbles/cluster.hpp"
#include "bubbles/errors.hpp"
#include "bubbles/geometry.hpp"

namespace bubbles {

// Gradients are stored per vertex in cluster order; the area Jacobian has
// one row per region in cluster order. Pinned vertices carry zero rows.
struct EnergyState {
  double perimeter = 0.0;
  std::vector<double> areas;
  std::vector<Point> perimeter_gradient;
  std::vector<std::vector<Point>> area_jacobian;
};

inline EnergyState evaluate(const Cluster& c, const QuadratureRule& rule = default_rule()) {
  const ClusterIndex idx(c);
  EnergyState s;
  s.areas.assign(c.regions.size(), 0.0);
  s.perimeter_gradient.assign(c.vertices.size(), Point{});
  s.area_jacobian.assign(c.regions.size(), std::vector<Point>(c.vertices.size()));
  std::vector<int> region_slot;
  auto slot = [&](int rid) -> int {
    if (rid == kExterior) return -1;
    auto it = idx.region.find(rid);
    if (it == idx.region.end()) throw MissingRegionError("evaluate: unknown region " + std::to_string(rid));
    return static_cast<int>(it->second);
  };
  for (const auto& e : c.edges) {
    const std::size_t it = idx.v(e.tail), ih = idx.v(e.head);
    const Point a = c.vertices[it].pos, b = c.vertices[ih].pos;
    if (a == b) throw ZeroLengthError("evaluate: edge " + std::to_string(e.id) + " has zero length");
    const SegmentMeasures m = measure_segment(a, b, c.density, rule);
    s.perimeter += m.length;
    s.perimeter_gradient[it] += m.length_grad.at_a;
    s.perimeter_gradient[ih] += m.length_grad.at_b;
    if (const int l = slot(e.left_region); l >= 0) {
      s.areas[static_cast<std::size_t>(l)] += m.area;
      s.area_jacobian[static_cast<std::size_t>(l)][it] += m.area_grad.at_a;
      s.area_jacobian[static_cast<std::size_t>(l)][ih] += m.area_grad.at_b;
    }
    if (const int r = slot(e.right_region); r >= 0) {
      s.areas[static_cast<std::size_t>(r)] -= m.area;
      s.area_jacobian[static_cast<std::size_t>(r)][it] -= m.area_grad.at_a;
      s.area_jacobian[static_cast<std::size_t>(r)][ih] -= m.area_grad.at_b;
    }
  }
  for (std::size_t i = 0; i < c.vertices.size(); ++i) {
    if (!c.vertices[i].pinned_to_origin) continue;
    s.perimeter_gradient[i] = {};
    for (auto& row : s.area_jacobian) row[i] = {};
  }
  return s;
}

inline double weighted_perimeter(const Cluster& c, const QuadratureRule& rule = default_rule()) {
  const ClusterIndex idx(c);
  double p = 0.0;
  for (const auto& e : c.edges)
    p += weighted_segment_length(c.vertices[idx.v(e.tail)].pos, c.vertices[idx.v(e.head)].pos, c.density,
                                 rule);
  return p;
}

inline std::vector<double> weighted_areas(const Cluster& c, const QuadratureRule& rule = default_rule()) {
  const ClusterIndex idx(c);
  std::vector<double> areas(c.regions.size(), 0.0);
  for (const auto& e : c.edges) {
    const double a = weighted_area_contribution(c.vertices[idx.v(e.tail)].pos,
                                                c.vertices[idx.v(e.head)].pos, c.density, rule);
    if (e.left_region != kExterior) areas[idx.region.at(e.left_region)] += a;
    if (e.right_region != kExterior) areas[idx.region.at(e.right_region)] -= a;
  }
  return areas;
}

// Largest |area - target| / target over all regions.
inline double max_area_residual(const Cluster& c, const std::vector<double>& areas) {
  double worst = 0.0;
  for (std::size_t i = 0; i < c.regions.size(); ++i)
    worst = std::max(worst, std::abs(areas[i] - c.regions[i].target_weighted_area) /
                                c.regions[i].target_weighted_area);
  return worst;
}

namespace detail {

using Matrix = std::vector<std::vector<double>>;

inline double dot_rows(const std::vector<Point>& a, const std::vector<Point>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += dot(a[i], b[i]);
  return s;
}

inline Matrix gram(const std::vector<std::vector<Point>>& rows) {
  const std::size_t k = rows.size();
  Matrix g(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) g[i][j] = g[j][i] = dot_rows(rows[i], rows[j]);
  return g;
}

// Inverse by Gauss-Jordan with partial pivoting; false on a zero pivot.
inline bool invert(Matrix m, Matrix& inv) {
  const std::size_t n = m.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) return false;
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    const double d = m[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      m[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0.0) continue;
      const double f = m[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return true;
}

inline double norm1(const Matrix& m) {
  double best = 0.0;
  for (std::size_t c = 0; c < m.size(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m.size(); ++r) s += std::abs(m[r][c]);
    best = std::max(best, s);
  }
  return best;
}

inline constexpr double kMaxGramCondition = 1e12;

// Solves G x = b for the tiny Gram systems, rejecting ill-conditioned ones.
inline std::vector<double> solve_gram(const Matrix& g, const std::vector<double>& b, const char* who) {
  Matrix inv;
  if (!invert(g, inv) || norm1(g) * norm1(inv) > kMaxGramCondition)
    throw SingularGramError(std::string(who) + ": singular Gram matrix (degenerate constraint geometry)");
  std::vector<double> x(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) x[i] += inv[i][j] * b[j];
  return x;
}

struct ProjectionOutcome {
  Cluster cluster;
  double residual = 0.0;  // max relative area error
  int newton_steps = 0;
};

inline ProjectionOutcome project(const Cluster& c, int max_iters, double rel_tol,
                                 const QuadratureRule& rule) {
  ProjectionOutcome out{c, 0.0, 0};
  if (c.regions.empty()) return out;
  EnergyState s = evaluate(out.cluster, rule);
  out.residual = max_area_residual(out.cluster, s.areas);
  for (int it = 0; it < max_iters && out.residual > rel_tol; ++it) {
    const Matrix g = gram(s.area_jacobian);
    std::vector<double> r(c.regions.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = s.areas[i] - out.cluster.regions[i].target_weighted_area;
    const std::vector<double> mu = solve_gram(g, r, "project_to_constraints");
    std::vector<Point> delta(c.vertices.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t v = 0; v < delta.size(); ++v) delta[v] -= s.area_jacobian[i][v] * mu[i];
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 8; ++halving, step *= 0.5) {
      Cluster trial = out.cluster;
      for (std::size_t v = 0; v < delta.size(); ++v) trial.vertices[v].pos += delta[v] * step;
      EnergyState ts;
      try {
        ts = evaluate(trial, rule);
      } catch (const ZeroLengthError&) {
        continue;
      }
      const double res = max_area_residual(trial, ts.areas);
      if (res < out.residual || halving == 8) {
        out.cluster = std::move(trial);
        s = std::move(ts);
        const bool stalled = res >= out.residual;
        out.residual = res;
        ++out.newton_steps;
        accepted = !stalled;
        break;
      }
    }
    if (!accepted) break;
  }
  return out;
}

}  // namespace detail

inline constexpr double kAreaTolerance = 1e-9;

// Newton iterations along the span of the area-gradient rows until every
// region is within kAreaTolerance (relative) of its target.
inline Cluster project_to_constraints(const Cluster& c, int max_iters = 50,
                                      const QuadratureRule& rule = default_rule()) {
  auto out = detail::project(c, max_iters, kAreaTolerance, rule);
  if (out.residual > kAreaTolerance)
    throw NoConvergenceError("project_to_constraints: area residual " + std::to_string(out.residual) +
                             " after " + std::to_string(out.newton_steps) + " Newton steps");
  return std::move(out.cluster);
}

struct ProjectedGradient {
  std::vector<Point> direction;  // per vertex, cluster order; zero when pinned
  double residual_norm = 0.0;    // RMS over unpinned vertices
  std::vector<double> multipliers;
  double perimeter = 0.0;
};

// Steepest-descent direction tangent to every area constraint.
inline ProjectedGradient projected_gradient(const Cluster& c, const EnergyState& s) {
  ProjectedGradient out;
  out.perimeter = s.perimeter;
  std::vector<double> b(c.regions.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = detail::dot_rows(s.area_jacobian[i], s.perimeter_gradient);
  out.multipliers = c.regions.empty() ? std::vector<double>{}
                                      : detail::solve_gram(detail::gram(s.area_jacobian), b, "projected_gradient");
  out.direction.assign(c.vertices.size(), Point{});
  double ss = 0.0;
  std::size_t free_count = 0;
  for (std::size_t v = 0; v < c.vertices.size(); ++v) {
    if (c.vertices[v].pinned_to_origin) continue;
    Point g = s.perimeter_gradient[v];
    for (std::size_t i = 0; i < out.multipliers.size(); ++i) g -= s.area_jacobian[i][v] * out.multipliers[i];
    out.direction[v] = -g;
    ss += norm2(g);
    ++free_count;
  }
  out.residual_norm = free_count ? std::sqrt(ss / static_cast<double>(free_count)) : 0.0;
  return out;
}

inline ProjectedGradient projected_gradient(const Cluster& c, const QuadratureRule& rule = default_rule()) {
  return projected_gradient(c, evaluate(c, rule));
}

}  // namespace bubbles
