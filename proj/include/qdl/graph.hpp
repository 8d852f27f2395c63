#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qdl/common.hpp"
#include "qdl/geometry.hpp"
#include "qdl/oracle.hpp"
#include "qdl/qdmodel.hpp"
#include "qdl/tracer.hpp"

namespace qdl {

struct GraphVertex {
  int zero = 0;  // index into QuadraticDifferential::zeros
  cplx location;
  bool at_infinity = false;
  int multiplicity = 2;
  double level = 0.0;
};

struct GraphEdge {
  int from = 0, from_ray = 0;  // outgoing (even) ray at the tail
  int to = 0, to_ray = 0;      // incoming (odd) ray at the head
  Trajectory path;
};

struct CriticalGraph {
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<int> component;  // component id per vertex
  int component_count = 0;

  int ray_total() const {
    int s = 0;
    for (const GraphVertex& v : vertices) s += v.multiplicity + 2;
    return s;
  }
};

// Traces every outgoing ray; each trace ends on an incoming ray, so each edge is
// found exactly once. Incoming rays must be hit exactly once.
inline CriticalGraph build_graph(const QuadraticDifferential& qd, const Tolerances& tol = {}) {
  if (qd.zeros.empty()) throw PreconditionError("build_graph: the differential has no zeros");
  const Tracer tracer(qd, tol);
  CriticalGraph g;
  for (std::size_t i = 0; i < qd.zeros.size(); ++i) {
    const CriticalPoint& z = qd.zeros[i];
    g.vertices.push_back({static_cast<int>(i), z.location, z.at_infinity, z.multiplicity, std::abs(z.value)});
  }
  std::vector<std::vector<int>> hits(g.vertices.size());
  for (std::size_t v = 0; v < g.vertices.size(); ++v) hits[v].assign(static_cast<std::size_t>(g.vertices[v].multiplicity + 2), 0);
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    for (int j = 0; j < g.vertices[v].multiplicity + 2; j += 2) {
      Trajectory t = tracer.trace_critical({static_cast<int>(v), j});
      if (t.end.kind != EndpointKind::CriticalPoint) throw NumericError("build_graph: critical trajectory did not terminate");
      ++hits[static_cast<std::size_t>(t.end.vertex)][static_cast<std::size_t>(t.end.ray)];
      g.edges.push_back({static_cast<int>(v), j, t.end.vertex, t.end.ray, std::move(t)});
    }
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    for (int j = 1; j < g.vertices[v].multiplicity + 2; j += 2)
      if (hits[v][static_cast<std::size_t>(j)] != 1) {
        std::ostringstream os;
        os << "build_graph: incoming ray " << j << " at vertex " << v << " matched "
           << hits[v][static_cast<std::size_t>(j)] << " times";
        throw NumericError(os.str());
      }
  if (2 * static_cast<int>(g.edges.size()) != g.ray_total())
    throw NumericError("build_graph: ray handshake failed");

  detail::UnionFind uf(g.vertices.size());
  for (const GraphEdge& e : g.edges) uf.unite(static_cast<std::size_t>(e.from), static_cast<std::size_t>(e.to));
  std::map<std::size_t, int> ids;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const auto [it, fresh] = ids.emplace(uf.find(v), static_cast<int>(ids.size()));
    g.component.push_back(it->second);
  }
  g.component_count = static_cast<int>(ids.size());
  return g;
}

inline std::optional<Trajectory> connecting_trajectory(const CriticalGraph& g, int i, int j) {
  for (const GraphEdge& e : g.edges)
    if ((e.from == i && e.to == j) || (e.from == j && e.to == i)) return e.path;
  return std::nullopt;
}

// Level-set census of |r| = c. Components meeting the window are traced; the
// window is doubled while the level set reaches its boundary or a component
// is known to lie outside it.
struct LemniscateCensus {
  int count = 0;
  std::vector<Trajectory> curves;
  Window window;
};

inline LemniscateCensus lemniscate_components(const QuadraticDifferential& qd, double c, Window window,
                                              const Tolerances& tol = {}) {
  const Tracer tracer(qd, tol);
  const RationalMap& r = qd.source;
  const double logc = std::log(c);
  // Sign of log|r| - log c near oo.
  const int dp = r.p().degree(), dq = r.q().degree();
  const double at_inf = dp > dq ? 1.0 : dp < dq ? -1.0 : std::log(std::abs(r.p().leading() / r.q().leading())) - logc;

  for (int attempt = 0; attempt < 40; ++attempt) {
    bool grow = false;
    constexpr int kEdge = 256;
    for (int k = 0; k <= kEdge && !grow; ++k) {
      const double s = static_cast<double>(k) / kEdge;
      const cplx pts[4] = {{window.xmin + s * window.width(), window.ymin},
                           {window.xmin + s * window.width(), window.ymax},
                           {window.xmin, window.ymin + s * window.height()},
                           {window.xmax, window.ymin + s * window.height()}};
      for (cplx z : pts) {
        const double f = std::log(std::abs(r(z))) - logc;
        if ((f > 0.0) != (at_inf > 0.0)) grow = true;
      }
    }
    if (!grow) {
      LemniscateCensus out;
      out.curves = tracer.level_set(c, window);
      out.count = static_cast<int>(out.curves.size());
      out.window = window;
      return out;
    }
    const cplx mid(0.5 * (window.xmin + window.xmax), 0.5 * (window.ymin + window.ymax));
    window = Window::centered(mid, window.width());
  }
  throw NumericError("lemniscate_components: level set does not fit in any window");
}

enum class FaceKind { Circle, Ring };

inline const char* to_string(FaceKind k) { return k == FaceKind::Circle ? "circle" : "ring"; }

struct FacePole {
  cplx location;
  bool at_infinity = false;
  int signed_multiplicity = 0;
};

// A boundary walk of one component: darts in order, with the face on the left.
struct RotationFace {
  int component = 0;
  std::vector<int> darts;  // dart 2e runs along edge e, 2e+1 against it
  bool outer = false;      // unbounded in the working plane
};

struct Face {
  FaceKind kind = FaceKind::Circle;
  std::vector<int> boundary;  // indices into DomainConfiguration::walks
  std::vector<FacePole> poles;
};

// Faces of the sphere cut along the critical graph. Geometry is done in the
// plane w = 1/(z - o) with o a finite double pole, so that oo is an ordinary
// point and every walk is a bounded closed polyline.
struct DomainConfiguration {
  cplx origin;
  std::vector<RotationFace> walks;
  std::vector<std::vector<cplx>> walk_polylines;  // in the w-plane
  std::vector<Face> faces;
  int euler_characteristic = 0;  // V - E + F

  int count(FaceKind k) const {
    return static_cast<int>(std::count_if(faces.begin(), faces.end(), [&](const Face& f) { return f.kind == k; }));
  }
};

namespace detail {

inline cplx to_w(cplx z, cplx origin) { return 1.0 / (z - origin); }

// Edge polyline in the w-plane; endpoints at oo become w = 0.
inline std::vector<cplx> edge_in_w(const CriticalGraph& g, const GraphEdge& e, cplx origin) {
  std::vector<cplx> out;
  if (g.vertices[static_cast<std::size_t>(e.from)].at_infinity) out.push_back(0.0);
  for (cplx z : e.path.points) out.push_back(to_w(z, origin));
  if (g.vertices[static_cast<std::size_t>(e.to)].at_infinity) out.push_back(0.0);
  return out;
}

struct DartTable {
  std::vector<int> tail, ray;
  std::vector<std::vector<int>> at_vertex;  // darts leaving each vertex, by ray index
};

inline DartTable darts(const CriticalGraph& g) {
  DartTable t;
  t.at_vertex.resize(g.vertices.size());
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    t.at_vertex[v].assign(static_cast<std::size_t>(g.vertices[v].multiplicity + 2), -1);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const GraphEdge& ed = g.edges[e];
    t.tail.push_back(ed.from);
    t.ray.push_back(ed.from_ray);
    t.tail.push_back(ed.to);
    t.ray.push_back(ed.to_ray);
    t.at_vertex[static_cast<std::size_t>(ed.from)][static_cast<std::size_t>(ed.from_ray)] = static_cast<int>(2 * e);
    t.at_vertex[static_cast<std::size_t>(ed.to)][static_cast<std::size_t>(ed.to_ray)] = static_cast<int>(2 * e + 1);
  }
  return t;
}

}  // namespace detail

// Index of the walk of `component` whose face contains x (w-plane point).
inline int point_face(const DomainConfiguration& dc, int component, cplx w) {
  int outer = -1;
  for (std::size_t i = 0; i < dc.walks.size(); ++i) {
    if (dc.walks[i].component != component) continue;
    if (dc.walks[i].outer) {
      outer = static_cast<int>(i);
      continue;
    }
    if (winding_number(dc.walk_polylines[i], w) == 1) return static_cast<int>(i);
  }
  return outer;
}

inline DomainConfiguration domain_configurations(const CriticalGraph& g, const QuadraticDifferential& qd) {
  if (qd.poles.empty()) throw PreconditionError("domain_configurations: no finite double pole");
  DomainConfiguration dc;
  dc.origin = qd.poles.front().location;
  const detail::DartTable dt = detail::darts(g);
  const std::size_t nd = dt.tail.size();

  std::vector<std::vector<cplx>> edge_w;
  for (const GraphEdge& e : g.edges) edge_w.push_back(detail::edge_in_w(g, e, dc.origin));
  auto dart_points = [&](int d) {
    std::vector<cplx> pts = edge_w[static_cast<std::size_t>(d / 2)];
    if (d % 2) std::reverse(pts.begin(), pts.end());
    return pts;
  };

  // Rays at a vertex are counterclockwise in ray order in every chart, and
  // z -> w preserves orientation. Face on the left: leave the head by the
  // clockwise neighbour of the reverse dart.
  auto next = [&](int d) {
    const int twin = d ^ 1;
    const int v = dt.tail[static_cast<std::size_t>(twin)];
    const auto& fan = dt.at_vertex[static_cast<std::size_t>(v)];
    const int n = static_cast<int>(fan.size());
    const int j = dt.ray[static_cast<std::size_t>(twin)];
    return fan[static_cast<std::size_t>((j - 1 + n) % n)];
  };

  std::vector<bool> seen(nd, false);
  for (std::size_t d0 = 0; d0 < nd; ++d0) {
    if (seen[d0]) continue;
    RotationFace rf;
    rf.component = g.component[static_cast<std::size_t>(dt.tail[d0])];
    std::vector<cplx> poly;
    int d = static_cast<int>(d0);
    do {
      seen[static_cast<std::size_t>(d)] = true;
      rf.darts.push_back(d);
      std::vector<cplx> pts = dart_points(d);
      poly.insert(poly.end(), pts.begin(), pts.end() - 1);
      d = next(d);
    } while (d != static_cast<int>(d0));
    rf.outer = signed_area(poly) < 0.0;
    dc.walks.push_back(std::move(rf));
    dc.walk_polylines.push_back(std::move(poly));
  }
  for (int c = 0; c < g.component_count; ++c) {
    const int outer = static_cast<int>(std::count_if(dc.walks.begin(), dc.walks.end(),
                                                     [&](const RotationFace& f) { return f.component == c && f.outer; }));
    if (outer != 1) throw NumericError("domain_configurations: component without a unique outer walk");
  }

  // One sample vertex per component, in the w-plane.
  std::vector<cplx> anchor(static_cast<std::size_t>(g.component_count));
  std::vector<bool> has_anchor(anchor.size(), false);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const auto c = static_cast<std::size_t>(g.component[v]);
    if (has_anchor[c]) continue;
    anchor[c] = g.vertices[v].at_infinity ? cplx{} : detail::to_w(g.vertices[v].location, dc.origin);
    has_anchor[c] = true;
  }

  // A face of the sphere is fixed by the walk it lies in for every component.
  std::map<std::vector<int>, int> face_of;
  std::vector<int> walk_face(dc.walks.size());
  for (std::size_t i = 0; i < dc.walks.size(); ++i) {
    const int own = dc.walks[i].component;
    std::vector<int> sig(static_cast<std::size_t>(g.component_count));
    for (int c = 0; c < g.component_count; ++c)
      sig[static_cast<std::size_t>(c)] = c == own ? static_cast<int>(i) : point_face(dc, c, anchor[static_cast<std::size_t>(own)]);
    auto [it, fresh] = face_of.emplace(sig, static_cast<int>(dc.faces.size()));
    if (fresh) dc.faces.emplace_back();
    dc.faces[static_cast<std::size_t>(it->second)].boundary.push_back(static_cast<int>(i));
    walk_face[i] = it->second;
  }

  auto signature = [&](cplx w, bool at_w_infinity) {
    std::vector<int> sig(static_cast<std::size_t>(g.component_count));
    for (int c = 0; c < g.component_count; ++c) {
      if (at_w_infinity) {
        for (std::size_t i = 0; i < dc.walks.size(); ++i)
          if (dc.walks[i].component == c && dc.walks[i].outer) sig[static_cast<std::size_t>(c)] = static_cast<int>(i);
      } else {
        sig[static_cast<std::size_t>(c)] = point_face(dc, c, w);
      }
    }
    return sig;
  };
  auto place = [&](const FacePole& p) {
    const bool at_origin = !p.at_infinity && p.location == dc.origin;
    const cplx w = p.at_infinity ? cplx{} : at_origin ? cplx{} : detail::to_w(p.location, dc.origin);
    const auto it = face_of.find(signature(w, at_origin));
    if (it == face_of.end()) throw NumericError("domain_configurations: double pole lies in no face");
    dc.faces[static_cast<std::size_t>(it->second)].poles.push_back(p);
  };
  for (const DoublePole& a : qd.poles) place({a.location, false, a.signed_multiplicity});
  if (qd.infinity_is_pole())
    place({cplx{}, true, qd.source.p().degree() - qd.source.q().degree()});

  for (Face& f : dc.faces) {
    if (f.poles.size() > 1) throw NumericError("domain_configurations: a face contains more than one double pole");
    if (f.poles.size() == 1) {
      f.kind = FaceKind::Circle;
    } else {
      f.kind = FaceKind::Ring;
      if (f.boundary.size() != 2) throw NumericError("domain_configurations: ring face without two boundary components");
    }
  }
  dc.euler_characteristic = static_cast<int>(g.vertices.size()) - static_cast<int>(g.edges.size()) +
                            static_cast<int>(dc.faces.size());
  if (dc.euler_characteristic != 1 + g.component_count)
    throw NumericError("domain_configurations: Euler characteristic mismatch");
  if (dc.count(FaceKind::Circle) != qd.double_pole_count())
    throw NumericError("domain_configurations: circle faces do not match double poles");
  return dc;
}

}  // namespace qdl
