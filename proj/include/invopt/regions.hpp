#pragma once

// Boundary segments of nominal and robust constraints in the plane. The
// bounding box is cut into cells on which every robust row is affine (the
// coordinate axes, plus the ordering lines alpha_i1 |x1| = alpha_i2 |x2| of
// cardinality rows); each cell contributes the piece of the row's line inside it.

#include "invopt/geometry.hpp"
#include "invopt/io.hpp"
#include "invopt/model.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace invopt::regions {

using Point = Eigen::Vector2d;
using Polygon = std::vector<Point>;
using Segment = std::array<Point, 2>;

enum class RegionKind { Nominal, PriorRobust, ImputedRobust };

inline std::string_view to_string(RegionKind k) {
  switch (k) {
    case RegionKind::Nominal: return "nominal";
    case RegionKind::PriorRobust: return "prior_robust";
    case RegionKind::ImputedRobust: return "imputed_robust";
  }
  return "unknown";
}

struct RegionPolyline {
  Index constraint_index = 0;  // 0-based
  RegionKind kind = RegionKind::Nominal;
  std::vector<Segment> segments;
};

struct BoundingBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

/// Row coefficients in effect at a point.
using Realization = std::function<Vector(const Vector&)>;

/// Clip a convex polygon to { p : w'p <= k }.
inline Polygon clip(const Polygon& poly, const Point& w, double k) {
  Polygon out;
  const std::size_t count = poly.size();
  for (std::size_t s = 0; s < count; ++s) {
    const Point& a = poly[s];
    const Point& b = poly[(s + 1) % count];
    const double da = w.dot(a) - k;
    const double db = w.dot(b) - k;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) out.push_back(a + (da / (da - db)) * (b - a));
  }
  return out;
}

inline double area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t s = 0; s < poly.size(); ++s) {
    const Point& a = poly[s];
    const Point& b = poly[(s + 1) % poly.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

inline Point centroid(const Polygon& poly) {
  Point c = Point::Zero();
  for (const auto& p : poly) c += p;
  return c / static_cast<double>(poly.size());
}

/// Cells of the box: the four quadrants, each optionally split by the line
/// a1 |x1| = a2 |x2|.
inline std::vector<Polygon> cells(const BoundingBox& box, std::optional<std::array<double, 2>> ordering) {
  const Polygon rect = {{box.x0, box.y0}, {box.x1, box.y0}, {box.x1, box.y1}, {box.x0, box.y1}};
  std::vector<Polygon> out;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      // Quadrant { sx x >= 0, sy y >= 0 }.
      Polygon q = clip(clip(rect, Point(-sx, 0.0), 0.0), Point(0.0, -sy), 0.0);
      if (q.size() < 3 || area(q) <= 1e-14) continue;
      if (!ordering) {
        out.push_back(q);
        continue;
      }
      // a1 sx x - a2 sy y <= 0 and >= 0.
      const Point w((*ordering)[0] * sx, -(*ordering)[1] * sy);
      for (const Polygon& half : {clip(q, w, 0.0), clip(q, -w, 0.0)})
        if (half.size() >= 3 && area(half) > 1e-14) out.push_back(half);
    }
  }
  return out;
}

/// The piece of { p : r'p = b } inside a convex polygon, if it has length.
inline std::optional<Segment> line_in_polygon(const Polygon& poly, const Point& r, double b) {
  if (r.norm() <= 1e-12) return std::nullopt;
  std::vector<Point> hits;
  const double eps = 1e-12 * (1.0 + std::abs(b));
  for (std::size_t s = 0; s < poly.size(); ++s) {
    const Point& a = poly[s];
    const Point& c = poly[(s + 1) % poly.size()];
    const double da = r.dot(a) - b;
    const double dc = r.dot(c) - b;
    if (std::abs(da) <= eps) hits.push_back(a);
    if ((da < -eps && dc > eps) || (da > eps && dc < -eps)) hits.push_back(a + (da / (da - dc)) * (c - a));
  }
  if (hits.size() < 2) return std::nullopt;
  Segment best{hits[0], hits[0]};
  double len = 0.0;
  for (std::size_t u = 0; u < hits.size(); ++u)
    for (std::size_t v = u + 1; v < hits.size(); ++v)
      if ((hits[u] - hits[v]).norm() > len) {
        len = (hits[u] - hits[v]).norm();
        best = {hits[u], hits[v]};
      }
  if (len <= 1e-12) return std::nullopt;
  return best;
}

inline RegionPolyline trace(Index row, RegionKind kind, const Realization& realize, double b, const BoundingBox& box,
                            std::optional<std::array<double, 2>> ordering) {
  RegionPolyline out;
  out.constraint_index = row;
  out.kind = kind;
  for (const auto& cell : cells(box, ordering)) {
    const Point c = centroid(cell);
    const Vector r = realize(Vector(c));
    if (auto seg = line_in_polygon(cell, Point(r(0), r(1)), b)) out.segments.push_back(*seg);
  }
  return out;
}

/// Polylines for every row of a two-variable problem and the kinds its model
/// and data admit: the nominal rows, the rows under the prior (when the
/// document carries one) and under the imputed parameters.
inline std::vector<RegionPolyline> region_polylines(const io::ProblemFile& pf, const InverseSolution& sol,
                                                    const BoundingBox& box) {
  const Index m = pf.problem.num_constraints();
  if (pf.problem.num_vars() != 2)
    throw Error(ErrorCode::DimensionNotPlottable, "regions need exactly two variables, got " +
                                                      std::to_string(pf.problem.num_vars()));
  if (!(box.x0 < box.x1 && box.y0 < box.y1)) throw Error(ErrorCode::InvalidArgument, "bbox must have x0 < x1 and y0 < y1");
  const auto structure = pf.structure();
  const bool interval = pf.model == ModelKind::RloIuDg || pf.model == ModelKind::RloIuSd;
  const bool card = pf.model == ModelKind::RloCcuDg || pf.model == ModelKind::RloCcuSd;
  std::vector<RegionPolyline> out;

  for (Index i = 0; i < m; ++i) {
    const Vector a = pf.problem.A.row(i).transpose();
    const double b = pf.problem.b(i);
    out.push_back(trace(i, RegionKind::Nominal, [a](const Vector&) { return a; }, b, box, std::nullopt));

    if (interval) {
      const auto& cols = structure.row_columns(i);
      if (pf.alpha) {
        const Vector al = pf.alpha->row(i).transpose();
        out.push_back(trace(i, RegionKind::PriorRobust,
                            [=](const Vector& p) { return geometry::realized_row_interval(a, al, cols, p); }, b, box,
                            std::nullopt));
      }
      if (sol.has_solution() && sol.alpha.rows() == m) {
        const Vector al = sol.alpha.row(i).transpose();
        out.push_back(trace(i, RegionKind::ImputedRobust,
                            [=](const Vector& p) { return geometry::realized_row_interval(a, al, cols, p); }, b, box,
                            std::nullopt));
      }
    } else if (card) {
      const auto& cols = structure.row_columns(i);
      const Vector al = structure.alpha.row(i).transpose();
      std::optional<std::array<double, 2>> ordering;
      if (cols.size() == 2 && al(0) > 0.0 && al(1) > 0.0) ordering = std::array<double, 2>{al(0), al(1)};
      auto budget_trace = [&](RegionKind kind, double gamma) {
        gamma = std::clamp(gamma, 0.0, static_cast<double>(cols.size()));
        out.push_back(trace(i, kind,
                            [=](const Vector& p) { return geometry::realized_row_cardinality(a, al, gamma, cols, p); },
                            b, box, ordering));
      };
      if (pf.model == ModelKind::RloCcuSd) budget_trace(RegionKind::PriorRobust, pf.make_prior().gamma(i));
      if (sol.has_solution() && sol.gamma.size() == m) budget_trace(RegionKind::ImputedRobust, sol.gamma(i));
    } else {
      if (pf.model == ModelKind::NloSd && pf.prior && pf.prior->estimates) {
        const Vector ah = pf.make_prior().matrix.row(i).transpose();
        out.push_back(trace(i, RegionKind::PriorRobust, [ah](const Vector&) { return ah; }, b, box, std::nullopt));
      }
      if (sol.has_solution() && sol.A.rows() == m) {
        const Vector ai = sol.A.row(i).transpose();
        out.push_back(trace(i, RegionKind::ImputedRobust, [ai](const Vector&) { return ai; }, b, box, std::nullopt));
      }
    }
  }
  return out;
}

inline io::json regions_to_json(const std::vector<RegionPolyline>& lines) {
  io::json arr = io::json::array();
  for (const auto& l : lines) {
    io::json segs = io::json::array();
    for (const auto& s : l.segments)
      segs.push_back({{s[0].x(), s[0].y()}, {s[1].x(), s[1].y()}});
    arr.push_back({{"constraint_index", l.constraint_index + 1}, {"kind", std::string(to_string(l.kind))}, {"segments", segs}});
  }
  return {{"schema_version", io::kSchemaVersion}, {"polylines", arr}};
}

}  // namespace invopt::regions
