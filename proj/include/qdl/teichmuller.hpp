#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "qdl/common.hpp"
#include "qdl/graph.hpp"

namespace qdl {

struct Corner {
  int vertex = 0;
  int multiplicity = 2;
  double measured = 0.0;  // radians
  int sectors = 1;        // angle = sectors * 2 pi / (m + 2)
  double angle() const { return sectors * kTwoPi / (multiplicity + 2); }
};

struct ContentPoint {
  cplx location;
  bool at_infinity = false;
  int n = 0;  // +m for a zero, -2 for a double pole
};

struct QDPolygon {
  int walk = 0;
  std::vector<Corner> corners;
  std::vector<ContentPoint> interior;
};

namespace detail {

// Mean direction from p0 to the five samples after it.
inline double leaving_direction(const std::vector<cplx>& pts) {
  cplx acc{};
  for (std::size_t i = 1; i < pts.size() && i <= 5; ++i) acc += (pts[i] - pts[0]) / std::abs(pts[i] - pts[0]);
  return std::arg(acc);
}

}  // namespace detail

// Polygon bounded by one boundary walk: the complementary region of its
// component that lies to the left of the walk.
inline QDPolygon polygon_from_face(const DomainConfiguration& dc, int walk, const CriticalGraph& g,
                                   const QuadraticDifferential& qd, const Tolerances& tol = {}) {
  if (walk < 0 || static_cast<std::size_t>(walk) >= dc.walks.size())
    throw PreconditionError("polygon_from_face: no such boundary walk");
  const RotationFace& rf = dc.walks[static_cast<std::size_t>(walk)];
  QDPolygon poly;
  poly.walk = walk;

  auto dart_points = [&](int d) {
    std::vector<cplx> pts = detail::edge_in_w(g, g.edges[static_cast<std::size_t>(d / 2)], dc.origin);
    if (d % 2) std::reverse(pts.begin(), pts.end());
    return pts;
  };
  const double snap = tol.angle_snap_deg * kPi / 180.0;
  const std::size_t n = rf.darts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int in = rf.darts[i];
    const int out = rf.darts[(i + 1) % n];
    std::vector<cplx> back = dart_points(in);
    std::reverse(back.begin(), back.end());
    const std::vector<cplx> fwd = dart_points(out);
    const int v = out % 2 ? g.edges[static_cast<std::size_t>(out / 2)].to : g.edges[static_cast<std::size_t>(out / 2)].from;
    const int m = g.vertices[static_cast<std::size_t>(v)].multiplicity;
    // Face on the left: the sector runs clockwise from the reverse of the
    // incoming dart to the outgoing dart.
    double a = detail::leaving_direction(back) - detail::leaving_direction(fwd);
    a = std::fmod(a, kTwoPi);
    if (a <= 0.0) a += kTwoPi;
    const double unit = kTwoPi / (m + 2);
    const int s = static_cast<int>(std::lround(a / unit));
    if (s < 1 || s > m + 1 || std::abs(a - s * unit) > snap) {
      std::ostringstream os;
      os << "polygon_from_face: corner angle " << a * 180.0 / kPi << " deg at vertex " << v
         << " is not an admissible multiple of " << unit * 180.0 / kPi << " deg";
      throw NumericError(os.str());
    }
    poly.corners.push_back({v, m, a, s});
  }

  // Interior: critical points in this walk's face that are not its vertices.
  auto inside = [&](cplx w, bool w_infinite) {
    if (w_infinite) return rf.outer;
    return point_face(dc, rf.component, w) == walk;
  };
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (g.component[v] == rf.component) continue;
    const GraphVertex& gv = g.vertices[v];
    const cplx w = gv.at_infinity ? cplx{} : detail::to_w(gv.location, dc.origin);
    if (inside(w, false)) poly.interior.push_back({gv.location, gv.at_infinity, gv.multiplicity});
  }
  for (const DoublePole& a : qd.poles) {
    const bool origin = a.location == dc.origin;
    if (inside(origin ? cplx{} : detail::to_w(a.location, dc.origin), origin))
      poly.interior.push_back({a.location, false, -2});
  }
  if (qd.infinity_is_pole() && inside(cplx{}, false)) poly.interior.push_back({cplx{}, true, -2});
  return poly;
}

struct TeichmullerSum {
  int lhs = 0;
  int rhs = 0;
  bool holds() const { return lhs == rhs; }
};

// lhs = sum over corners of 1 - (m + 2) t / 2 pi, rhs = 2 + sum of interior n.
inline TeichmullerSum teichmuller_sum(const QDPolygon& poly) {
  TeichmullerSum s;
  for (const Corner& c : poly.corners) s.lhs += 1 - c.sectors;
  s.rhs = 2;
  for (const ContentPoint& p : poly.interior) s.rhs += p.n;
  return s;
}

}  // namespace qdl
