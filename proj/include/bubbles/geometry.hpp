#pragma once

// Weighted measures under the radial density |q|^p: segment lengths, signed
// area contributions, their endpoint gradients, circle fitting and discrete
// generalized curvature.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bubbles/errors.hpp"
#include "bubbles/point.hpp"
#include "bubbles/quadrature.hpp"

namespace bubbles {

// Radius below which a point is treated as sitting on the origin.
inline constexpr double kOriginEps = 1e-12;

struct DensityField {
  double p = 0.0;
};

inline void require_valid(const DensityField& d) {
  if (!(d.p >= 0.0) || !std::isfinite(d.p)) throw Error("density exponent must be finite and >= 0");
}

inline double density_at(const Point& q, const DensityField& d) {
  if (d.p == 0.0) return 1.0;
  const double r2 = norm2(q);
  if (r2 == 0.0) return 0.0;
  return std::pow(r2, 0.5 * d.p);
}

// Gradient of |q|^p; the radius is clamped to kOriginEps so the result stays
// finite for p < 1.
inline Point density_gradient(const Point& q, const DensityField& d) {
  if (d.p == 0.0) return {};
  const double r = std::max(norm(q), kOriginEps);
  return q * (d.p * std::pow(r, d.p - 2.0));
}

namespace detail {

// Value of I(a, b) = int_0^1 f(a + t (b - a)) dt together with its term-by-term
// derivatives with respect to a and b.
struct LineIntegral {
  double value = 0.0;
  Point d_a;
  Point d_b;
};

// Visits (t, w) over a composite rule on [0, 1]. Panels are graded
// dyadically toward the point of the segment closest to the origin until each
// panel lies at least its own length away from the origin, which keeps
// Gauss-Legendre accurate for fractional p.
template <class Visit>
void for_each_node(const Point& a, const Point& b, const QuadratureRule& rule, Visit&& visit) {
  const Point ab = b - a;
  const double len2 = norm2(ab);
  const double len = std::sqrt(len2);
  auto panel = [&](double lo, double hi) {
    const double h = hi - lo;
    if (h <= 0.0) return;
    for (const auto& [t, w] : rule.nodes) visit(lo + h * t, h * w);
  };
  double tstar = len2 > 0.0 ? std::clamp(-dot(a, ab) / len2, 0.0, 1.0) : 0.0;
  const double dist = norm(a + ab * tstar);
  if (len == 0.0 || dist >= len) {
    panel(0.0, 1.0);
    return;
  }
  constexpr double kMinPanel = 1e-15;
  // Right of tstar.
  {
    double hi = 1.0;
    while (hi > tstar) {
      const double width = hi - tstar;
      if (width * len <= dist || width < kMinPanel) {
        panel(tstar, hi);
        break;
      }
      const double mid = tstar + 0.5 * width;
      panel(mid, hi);
      hi = mid;
    }
  }
  // Left of tstar.
  {
    double lo = 0.0;
    while (lo < tstar) {
      const double width = tstar - lo;
      if (width * len <= dist || width < kMinPanel) {
        panel(lo, tstar);
        break;
      }
      const double mid = tstar - 0.5 * width;
      panel(lo, mid);
      lo = mid;
    }
  }
}

inline bool lex_less(const Point& a, const Point& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// Integrates in a canonical endpoint order; I(a, b) and I(b, a) agree bit
// for bit.
inline LineIntegral line_integral(const Point& a, const Point& b, const DensityField& d,
                                  const QuadratureRule& rule, bool want_gradient = true) {
  const bool swapped = lex_less(b, a);
  const Point& u = swapped ? b : a;
  const Point& v = swapped ? a : b;
  LineIntegral out;
  if (d.p == 0.0) {
    out.value = 1.0;
    return out;
  }
  const Point uv = v - u;
  for_each_node(u, v, rule, [&](double t, double w) {
    const Point q = u + uv * t;
    out.value += w * density_at(q, d);
    if (want_gradient) {
      const Point g = density_gradient(q, d);
      out.d_a += g * (w * (1.0 - t));
      out.d_b += g * (w * t);
    }
  });
  if (swapped) std::swap(out.d_a, out.d_b);
  return out;
}

}  // namespace detail

struct EndpointGradient {
  Point at_a;
  Point at_b;
};

inline double weighted_segment_length(const Point& a, const Point& b, const DensityField& d,
                                      const QuadratureRule& rule = default_rule()) {
  if (a == b) throw ZeroLengthError("weighted_segment_length: degenerate segment");
  const double len = distance(a, b);
  return len * detail::line_integral(a, b, d, rule, false).value;
}

inline EndpointGradient grad_weighted_segment_length(const Point& a, const Point& b,
                                                     const DensityField& d,
                                                     const QuadratureRule& rule = default_rule()) {
  if (a == b) throw ZeroLengthError("grad_weighted_segment_length: degenerate segment");
  const double len = distance(a, b);
  const Point unit = (b - a) / len;
  const auto li = detail::line_integral(a, b, d, rule);
  return {unit * -li.value + li.d_a * len, unit * li.value + li.d_b * len};
}

// Signed weighted area swept by the directed segment a -> b; summing over a
// counterclockwise loop yields the enclosed weighted area. Uses the flux of
// r^p (x, y) / (p + 2), whose divergence is r^p.
inline double weighted_area_contribution(const Point& a, const Point& b, const DensityField& d,
                                         const QuadratureRule& rule = default_rule()) {
  return cross(a, b) / (d.p + 2.0) * detail::line_integral(a, b, d, rule, false).value;
}

inline EndpointGradient grad_weighted_area_contribution(const Point& a, const Point& b,
                                                        const DensityField& d,
                                                        const QuadratureRule& rule = default_rule()) {
  if (a == b) throw ZeroLengthError("grad_weighted_area_contribution: degenerate segment");
  const double c = cross(a, b);
  const double k = 1.0 / (d.p + 2.0);
  const auto li = detail::line_integral(a, b, d, rule);
  const Point dc_da{b.y, -b.x};
  const Point dc_db{-a.y, a.x};
  return {(dc_da * li.value + li.d_a * c) * k, (dc_db * li.value + li.d_b * c) * k};
}

// Everything the energy module needs from one segment in a single pass.
struct SegmentMeasures {
  double length = 0.0;
  double area = 0.0;  // contribution of the directed segment a -> b
  EndpointGradient length_grad;
  EndpointGradient area_grad;
};

inline SegmentMeasures measure_segment(const Point& a, const Point& b, const DensityField& d,
                                       const QuadratureRule& rule = default_rule()) {
  if (a == b) throw ZeroLengthError("measure_segment: degenerate segment");
  const auto li = detail::line_integral(a, b, d, rule);
  const double len = distance(a, b);
  const Point unit = (b - a) / len;
  const double c = cross(a, b);
  const double k = 1.0 / (d.p + 2.0);
  SegmentMeasures m;
  m.length = len * li.value;
  m.area = c * k * li.value;
  m.length_grad = {unit * -li.value + li.d_a * len, unit * li.value + li.d_b * len};
  m.area_grad = {(Point{b.y, -b.x} * li.value + li.d_a * c) * k,
                 (Point{-a.y, a.x} * li.value + li.d_b * c) * k};
  return m;
}

// Sum of contributions along a closed loop (last point connects to first).
inline double loop_weighted_area(std::span<const Point> loop, const DensityField& d,
                                 const QuadratureRule& rule = default_rule()) {
  double sum = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    sum += weighted_area_contribution(loop[i], loop[(i + 1) % loop.size()], d, rule);
  return sum;
}

inline double loop_weighted_length(std::span<const Point> loop, const DensityField& d,
                                   const QuadratureRule& rule = default_rule()) {
  double sum = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    sum += weighted_segment_length(loop[i], loop[(i + 1) % loop.size()], d, rule);
  return sum;
}

inline std::vector<Point> scale_points(std::span<const Point> points, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidScaleError("scale_points: scale must be positive");
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& q : points) out.push_back(q * lambda);
  return out;
}

// ---------------------------------------------------------------------------
// Circles

struct CircleFit {
  Point center;
  double radius = 0.0;
  double rms_residual = 0.0;
  // |dist(center, origin) - radius| / radius
  double through_origin_residual = 0.0;
};

namespace detail {

// Solves a 3x3 system by Gaussian elimination with partial pivoting. Returns
// false when a pivot vanishes relative to the matrix scale.
inline bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
                   std::array<double, 3>& x, double rel_tol = 1e-14) {
  double scale = 0.0;
  for (const auto& row : m)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) <= rel_tol * scale) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < 3; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return true;
}

}  // namespace detail

// Algebraic (Kasa) fit refined by Gauss-Newton on the geometric residuals.
inline CircleFit fit_circle(std::span<const Point> samples) {
  const std::size_t n = samples.size();
  if (n < 3) throw InsufficientSamplesError("fit_circle: need at least 3 samples");
  Point centroid;
  for (const auto& q : samples) centroid += q;
  centroid = centroid / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& q : samples) {
    const Point u = q - centroid;
    sxx += u.x * u.x;
    sxy += u.x * u.y;
    syy += u.y * u.y;
  }
  // Smallest/largest principal variance; zero for collinear input.
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double lmax = 0.5 * tr + disc;
  const double lmin = std::max(0.0, det / std::max(lmax, 1e-300));
  if (lmax == 0.0 || lmin <= 1e-14 * lmax) throw CollinearError("fit_circle: samples are collinear");

  const double scale = std::sqrt(lmax / static_cast<double>(n));
  // Kasa: minimise sum (u^2 + v^2 + D u + E v + F)^2 in centred, scaled coords.
  std::array<std::array<double, 3>, 3> ata{};
  std::array<double, 3> atb{};
  for (const auto& q : samples) {
    const Point u = (q - centroid) / scale;
    const std::array<double, 3> row{u.x, u.y, 1.0};
    const double z = -(u.x * u.x + u.y * u.y);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ata[i][j] += row[i] * row[j];
      atb[i] += row[i] * z;
    }
  }
  std::array<double, 3> sol{};
  if (!detail::solve3(ata, atb, sol, 1e-18)) throw CollinearError("fit_circle: degenerate algebraic fit");
  Point c{-0.5 * sol[0], -0.5 * sol[1]};
  double r2 = norm2(c) - sol[2];
  if (!(r2 > 0.0)) throw CollinearError("fit_circle: degenerate algebraic fit");
  double r = std::sqrt(r2);

  // Gauss-Newton on (cx, cy, r), still in scaled coordinates.
  for (int it = 0; it < 50; ++it) {
    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    for (const auto& q : samples) {
      const Point u = (q - centroid) / scale;
      const Point dv = u - c;
      const double dist = norm(dv);
      if (dist == 0.0) continue;
      const double res = dist - r;
      const std::array<double, 3> jrow{-dv.x / dist, -dv.y / dist, -1.0};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) jtj[i][j] += jrow[i] * jrow[j];
        jtr[i] -= jrow[i] * res;
      }
    }
    std::array<double, 3> step{};
    if (!detail::solve3(jtj, jtr, step, 1e-20)) break;
    c.x += step[0];
    c.y += step[1];
    r += step[2];
    if (std::abs(step[0]) + std::abs(step[1]) + std::abs(step[2]) < 1e-12 * (1.0 + r)) break;
  }
  CircleFit fit;
  fit.center = centroid + c * scale;
  fit.radius = std::abs(r) * scale;
  double ss = 0.0;
  for (const auto& q : samples) {
    const double res = distance(q, fit.center) - fit.radius;
    ss += res * res;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  fit.through_origin_residual = std::abs(norm(fit.center) - fit.radius) / fit.radius;
  return fit;
}

enum class NormalSide { left, right };

namespace detail {

// Signed curvature of the circle through (a, b, c), positive for a left turn,
// and the unit left normal at b consistent with that circle.
inline void circumcircle_at(const Point& a, const Point& b, const Point& c, double& kappa,
                            Point& left_normal) {
  const double lab = distance(a, b), lbc = distance(b, c), lac = distance(a, c);
  const double twice_area = cross(b - a, c - a);
  kappa = 2.0 * twice_area / (lab * lbc * lac);
  const Point chord = c - a;
  const double denom = 2.0 * twice_area;
  if (std::abs(kappa) * lac < 1e-14 || denom == 0.0) {
    left_normal = perp(chord / norm(chord));
    return;
  }
  // Circumcentre via the standard formula relative to a.
  const Point ba = b - a, ca = c - a;
  const double bb = norm2(ba), cc = norm2(ca);
  const Point center = a + Point{(ca.y * bb - ba.y * cc) / denom, (ba.x * cc - ca.x * bb) / denom};
  Point to_center = (center - b) / norm(center - b);
  left_normal = kappa > 0.0 ? to_center : -to_center;
}

}  // namespace detail

// kappa_f = kappa_0 - d(log f)/dN at every interior sample, with N the unit
// normal on the requested side. Samples within kOriginEps of the origin are
// skipped, as are samples closer to the origin than `origin_spacings` times
// the longer adjacent spacing.
inline std::vector<double> generalized_curvature_samples(std::span<const Point> samples,
                                                         NormalSide inward,
                                                         const DensityField& d,
                                                         double origin_spacings = 0.0) {
  if (samples.size() < 5)
    throw InsufficientSamplesError("generalized_curvature_samples: need at least 5 samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i] == samples[i - 1])
      throw ZeroLengthError("generalized_curvature_samples: repeated sample");
  std::vector<double> out;
  out.reserve(samples.size() - 2);
  const double sign = inward == NormalSide::left ? 1.0 : -1.0;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const Point& q = samples[i];
    const double r2 = norm2(q);
    if (r2 < kOriginEps * kOriginEps) continue;
    if (origin_spacings > 0.0) {
      const double h = std::max(distance(samples[i - 1], q), distance(q, samples[i + 1]));
      if (r2 < std::pow(origin_spacings * h, 2)) continue;
    }
    double kappa = 0.0;
    Point nl;
    detail::circumcircle_at(samples[i - 1], q, samples[i + 1], kappa, nl);
    const Point normal = nl * sign;
    const double dlogf = d.p * dot(q, normal) / r2;
    out.push_back(sign * kappa - dlogf);
  }
  return out;
}

}  // namespace bubbles
