#pragma once

// Second variation of the Lagrangian P - sum(lambda_i A_i) over the free vertex
// coordinates, and the damped constrained Newton direction built from it.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "bubbles/cluster.hpp"
#include "bubbles/energy.hpp"

namespace bubbles {

// Free coordinate numbering: vertex index -> first of its two coordinates, or -1.
struct DofMap {
  std::vector<int> first;
  int count = 0;
  explicit DofMap(const Cluster& c) : first(c.vertices.size(), -1) {
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
      if (c.vertices[i].pinned_to_origin) continue;
      first[i] = count;
      count += 2;
    }
  }
};

struct LagrangianHessian {
  Eigen::SparseMatrix<double> hessian;
  Eigen::VectorXd mass;  // per free coordinate, from the incident edges
};

namespace hessian_detail {

using Block = std::array<std::array<double, 4>, 4>;

inline std::array<double, 4> flat(const EndpointGradient& g) { return {g.at_a.x, g.at_a.y, g.at_b.x, g.at_b.y}; }

// Central differences of the exact per-segment gradients.
inline void segment_blocks(Point a, Point b, const DensityField& d, Block& h_len, Block& h_area) {
  const double h = 1e-6 * distance(a, b);
  for (int j = 0; j < 4; ++j) {
    Point ap = a, am = a, bp = b, bm = b;
    double* cp = j == 0 ? &ap.x : j == 1 ? &ap.y : j == 2 ? &bp.x : &bp.y;
    double* cm = j == 0 ? &am.x : j == 1 ? &am.y : j == 2 ? &bm.x : &bm.y;
    *cp += h;
    *cm -= h;
    const SegmentMeasures mp = measure_segment(ap, bp, d), mm = measure_segment(am, bm, d);
    const auto lp = flat(mp.length_grad), lm = flat(mm.length_grad);
    const auto ap4 = flat(mp.area_grad), am4 = flat(mm.area_grad);
    for (int i = 0; i < 4; ++i) {
      h_len[i][j] = (lp[i] - lm[i]) / (2 * h);
      h_area[i][j] = (ap4[i] - am4[i]) / (2 * h);
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      h_len[i][j] = h_len[j][i] = 0.5 * (h_len[i][j] + h_len[j][i]);
      h_area[i][j] = h_area[j][i] = 0.5 * (h_area[i][j] + h_area[j][i]);
    }
}

}  // namespace hessian_detail

// `multipliers` in region order, as returned by projected_gradient.
inline LagrangianHessian lagrangian_hessian(const Cluster& c, const std::vector<double>& multipliers,
                                            const DofMap& dofs) {
  const ClusterIndex idx(c);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(c.edges.size() * 16);
  LagrangianHessian out;
  out.mass = Eigen::VectorXd::Zero(dofs.count);
  // Damping mass uses a density floor of 1% of the mean density along the
  // boundary, so nearly weightless vertices near the origin stay damped.
  double total_weighted = 0.0, total_length = 0.0;
  for (const auto& e : c.edges) {
    const Point a = c.vertices[idx.v(e.tail)].pos, b = c.vertices[idx.v(e.head)].pos;
    total_weighted += weighted_segment_length(a, b, c.density);
    total_length += distance(a, b);
  }
  const double density_floor = total_length > 0.0 ? 1e-2 * total_weighted / total_length : 0.0;
  auto lambda_of = [&](int rid) { return rid == kExterior ? 0.0 : multipliers[idx.region.at(rid)]; };
  for (const auto& e : c.edges) {
    const std::size_t it = idx.v(e.tail), ih = idx.v(e.head);
    const Point a = c.vertices[it].pos, b = c.vertices[ih].pos;
    hessian_detail::Block hl{}, ha{};
    hessian_detail::segment_blocks(a, b, c.density, hl, ha);
    const double w = lambda_of(e.left_region) - lambda_of(e.right_region);
    const std::array<int, 4> dof{dofs.first[it], dofs.first[it] < 0 ? -1 : dofs.first[it] + 1, dofs.first[ih],
                                 dofs.first[ih] < 0 ? -1 : dofs.first[ih] + 1};
    for (int i = 0; i < 4; ++i) {
      if (dof[i] < 0) continue;
      for (int j = 0; j < 4; ++j) {
        if (dof[j] < 0) continue;
        trip.emplace_back(dof[i], dof[j], hl[i][j] - w * ha[i][j]);
      }
    }
    const double half = 0.5 * (weighted_segment_length(a, b, c.density) + density_floor * distance(a, b));
    for (int i = 0; i < 4; ++i)
      if (dof[i] >= 0) out.mass[dof[i]] += half;
  }
  out.hessian.resize(dofs.count, dofs.count);
  out.hessian.setFromTriplets(trip.begin(), trip.end());
  return out;
}

// Solves min 1/2 d'(H + mu M)d + g'd subject to J d = 0. Returns nullopt when
// the factorization fails or the result is not a descent direction.
inline std::optional<std::vector<Point>> damped_newton_direction(const Cluster& c, const EnergyState& s,
                                                                 const ProjectedGradient& pg,
                                                                 const LagrangianHessian& lh,
                                                                 const DofMap& dofs, double mu) {
  const int n = dofs.count;
  const int k = static_cast<int>(c.regions.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(lh.hessian.nonZeros() + n + 4 * n * k));
  for (int col = 0; col < lh.hessian.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(lh.hessian, col); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, mu * lh.mass[i]);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + k);
  for (std::size_t v = 0; v < c.vertices.size(); ++v) {
    const int f = dofs.first[v];
    if (f < 0) continue;
    // The direction field already holds minus the projected gradient.
    rhs[f] = pg.direction[v].x;
    rhs[f + 1] = pg.direction[v].y;
    for (int r = 0; r < k; ++r) {
      const Point jr = s.area_jacobian[static_cast<std::size_t>(r)][v];
      trip.emplace_back(n + r, f, jr.x);
      trip.emplace_back(n + r, f + 1, jr.y);
      trip.emplace_back(f, n + r, jr.x);
      trip.emplace_back(f + 1, n + r, jr.y);
    }
  }
  Eigen::SparseMatrix<double> kkt(n + k, n + k);
  kkt.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(kkt);
  if (lu.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite()) return std::nullopt;
  std::vector<Point> d(c.vertices.size());
  double slope = 0.0;
  for (std::size_t v = 0; v < c.vertices.size(); ++v) {
    const int f = dofs.first[v];
    if (f < 0) continue;
    d[v] = {sol[f], sol[f + 1]};
    slope -= dot(d[v], pg.direction[v]);
  }
  if (!(slope < 0.0)) return std::nullopt;
  return d;
}

}  // namespace bubbles
