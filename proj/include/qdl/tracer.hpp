#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdl/chart.hpp"
#include "qdl/common.hpp"
#include "qdl/geometry.hpp"
#include "qdl/polynomial.hpp"
#include "qdl/qdmodel.hpp"

namespace qdl {

enum class EndpointKind { CriticalPoint, ClosedLoop };

struct Endpoint {
  EndpointKind kind = EndpointKind::ClosedLoop;
  int vertex = -1;  // index into QuadraticDifferential::zeros
  int ray = -1;
};

// A horizontal trajectory: a piece of the level set |r| = level, sampled in the
// plane and oriented so that arg r increases. An endpoint at oo has no sample.
struct Trajectory {
  std::vector<cplx> points;
  double level = 0.0;
  Endpoint start, end;
  double total_arg_change = 0.0;

  bool closed() const { return end.kind == EndpointKind::ClosedLoop; }
};

struct RayIndex {
  int vertex = 0;
  int ray = 0;
};

// Centered box with half-width 2 + 2 max |root of pq|.
inline Window default_window(const QuadraticDifferential& qd) {
  double m = 0.0;
  for (const DoublePole& a : qd.poles) m = std::max(m, std::abs(a.location));
  return Window::centered(0.0, 2.0 + 2.0 * m);
}

// Traces horizontal trajectories of -(r'/r)^2 dz^2, i.e. level curves of |r|.
//
// Curves are parametrized by arg r: each step advances arg r by dtheta along the
// tangent i/g (g = r'/r), then Newton on log r(x) = log c + i theta puts the
// point back on the curve at exactly the requested argument. Steps are bounded in
// arc length by [step_min, step_max] and by the local curvature scale |g/g'|.
// Beyond chart_switch_radius() the u = 1/z chart is used.
class Tracer {
 public:
  explicit Tracer(const QuadraticDifferential& qd, const Tolerances& tol = {})
      : qd_(qd), tol_(tol), plane_(qd.source, Chart::Plane), inverted_(qd.source, Chart::Inverted) {
    switch_radius_ = 10.0 * (qd.root_scale + 1.0);
    for (std::size_t v = 0; v < qd.zeros.size(); ++v) vertices_.push_back(make_vertex(static_cast<int>(v)));
  }

  const QuadraticDifferential& model() const { return qd_; }
  const Tolerances& tolerances() const { return tol_; }
  double chart_switch_radius() const { return switch_radius_; }

  int ray_count(int v) const { return vertices_.at(static_cast<std::size_t>(v)).m + 2; }
  // Direction of ray j at vertex v, in the vertex's own chart. Even rays leave the
  // vertex with increasing arg r, odd rays arrive at it.
  double ray_angle(int v, int j) const {
    const Vertex& vx = vertices_.at(static_cast<std::size_t>(v));
    return vx.phi0 + j * kTwoPi / (vx.m + 2);
  }
  double launch_radius(int v) const { return vertices_.at(static_cast<std::size_t>(v)).launch; }
  double capture_radius(int v) const { return vertices_.at(static_cast<std::size_t>(v)).capture; }

  // Closed level curve |r| = c through seed.
  Trajectory trace_level(double c, cplx seed) const {
    if (!(c > 0.0)) throw PreconditionError("trace_level: level must be positive");
    for (const Vertex& v : vertices_)
      if (std::abs(c - v.level) <= tol_.level_guard * v.level) {
        std::ostringstream os;
        os << "trace_level: level " << c << " collides with critical modulus " << v.level;
        throw PreconditionError(os.str());
      }
    const double rel = std::abs(std::abs(qd_.source(seed)) - c) / c;
    if (!(rel <= tol_.trace)) throw PreconditionError("trace_level: seed is not on the level curve");
    for (const Vertex& v : vertices_)
      if (!v.at_infinity && std::abs(seed - v.pos) < v.capture)
        throw PreconditionError("trace_level: seed lies within the capture radius of a critical point");

    const ChartMap& map = std::abs(seed) > switch_radius_ ? inverted_ : plane_;
    cplx x = map.from_plane(seed);
    const double theta0 = std::arg(map.value(x));
    x = snap(map, x, c, theta0);
    MarchInput in{map.chart(), x, theta0, c, +1, -1, x, map.chart()};
    Trajectory t = march(in);
    t.start = {EndpointKind::ClosedLoop, -1, -1};
    return t;
  }

  // The critical trajectory leaving (or, for odd rays, arriving at) a zero along
  // the given ray, oriented by increasing arg r.
  Trajectory trace_critical(RayIndex ray) const {
    if (ray.vertex < 0 || static_cast<std::size_t>(ray.vertex) >= vertices_.size())
      throw PreconditionError("trace_critical: no such vertex");
    const Vertex& v = vertices_[static_cast<std::size_t>(ray.vertex)];
    if (ray.ray < 0 || ray.ray >= v.m + 2) throw PreconditionError("trace_critical: ray index out of range");
    const int dir = (ray.ray % 2 == 0) ? +1 : -1;
    const ChartMap& map = v.chart == Chart::Plane ? plane_ : inverted_;
    const double phi = ray_angle(ray.vertex, ray.ray);
    const cplx offset = std::polar(v.launch, phi);
    // arg r at the launch point from the local model r ~ w exp(L x^(k+1)).
    const double dtheta = (v.lead * std::pow(offset, v.k + 1)).imag();
    const double theta0 = v.phase + dtheta;
    const cplx x = snap(map, v.pos + offset, v.level, theta0);
    MarchInput in{map.chart(), x, theta0, v.level, dir, ray.vertex, std::nullopt, map.chart()};
    Trajectory t = march(in);
    if (!v.at_infinity) t.points.insert(t.points.begin(), v.pos);
    t.start = {EndpointKind::CriticalPoint, ray.vertex, ray.ray};
    if (dir < 0) {
      std::reverse(t.points.begin(), t.points.end());
      std::swap(t.start, t.end);
    }
    return t;
  }

  // Seeds on every component of |r| = c meeting the window, one per component.
  std::vector<cplx> level_seeds(double c, const Window& window) const {
    std::vector<cplx> seeds;
    for (const Trajectory& t : level_set(c, window)) seeds.push_back(t.points.front());
    return seeds;
  }

  // All components of |r| = c meeting the window, traced.
  std::vector<Trajectory> level_set(double c, const Window& window) const {
    std::vector<Trajectory> out;
    for (cplx cand : level_candidates(c, window)) {
      bool known = false;
      for (const Trajectory& t : out)
        if (on_polyline(cand, t.points)) {
          known = true;
          break;
        }
      if (known) continue;
      bool near_critical = false;
      for (const Vertex& v : vertices_)
        if (!v.at_infinity && std::abs(cand - v.pos) < v.capture) near_critical = true;
      if (near_critical) continue;
      out.push_back(trace_level(c, cand));
    }
    return out;
  }

 private:
  struct Vertex {
    Chart chart = Chart::Plane;
    bool at_infinity = false;
    cplx pos;           // position in its own chart
    int k = 1;          // root order of N
    int m = 2;          // multiplicity of the zero of the differential
    double level = 0.0;
    double phase = 0.0; // arg of the critical value
    cplx lead;          // L with log r - log w ~ L x^(k+1)
    double phi0 = 0.0;
    double launch = 0.0, capture = 0.0;
  };

  struct MarchInput {
    Chart chart;
    cplx x;
    double theta;
    double level;
    int dir;
    int source;                  // vertex the march leaves from, or -1
    std::optional<cplx> seed;    // closure target for closed loops, in seed_chart
    Chart seed_chart;
  };

  Vertex make_vertex(int index) const {
    const CriticalPoint& z = qd_.zeros[static_cast<std::size_t>(index)];
    Vertex v;
    v.at_infinity = z.at_infinity;
    v.chart = z.at_infinity ? Chart::Inverted : Chart::Plane;
    v.pos = z.at_infinity ? cplx{} : z.location;
    v.k = z.numerator_order;
    v.m = z.multiplicity;
    v.level = std::abs(z.value);
    v.phase = std::arg(z.value);
    const ChartMap& map = z.at_infinity ? inverted_ : plane_;
    // k-th Taylor coefficient of N at the vertex.
    Polynomial d = map.numerator();
    double fact = 1.0;
    for (int i = 1; i <= v.k; ++i) {
      d = d.derivative();
      fact *= i;
    }
    const cplx g_lead = d(v.pos) / fact / (map.p()(v.pos) * map.q()(v.pos));
    v.lead = g_lead / static_cast<double>(v.k + 1);
    v.phi0 = (kPi / 2 - std::arg(v.lead)) / (v.k + 1);

    double sep = std::numeric_limits<double>::infinity();
    auto consider = [&](cplx other, bool other_inf) {
      if (z.at_infinity) {
        if (!other_inf && other != cplx{}) sep = std::min(sep, 1.0 / std::abs(other));
      } else if (!other_inf) {
        const double d2 = std::abs(other - z.location);
        if (d2 > 0.0) sep = std::min(sep, d2);
      }
    };
    for (std::size_t j = 0; j < qd_.zeros.size(); ++j)
      if (static_cast<int>(j) != index) consider(qd_.zeros[j].location, qd_.zeros[j].at_infinity);
    for (const DoublePole& a : qd_.poles) consider(a.location, false);
    if (!std::isfinite(sep)) sep = 1.0;
    v.launch = tol_.launch_factor * sep;
    v.capture = tol_.capture_factor * v.launch;
    return v;
  }

  // Newton on log r(x) = log c + i theta.
  static std::optional<std::pair<cplx, int>> correct(const ChartMap& map, cplx x, double c, double theta,
                                                     int max_iter) {
    const cplx target = std::polar(c, theta);
    for (int it = 1; it <= max_iter; ++it) {
      const cplx res = map.log_ratio(x, target);
      const cplx g = map.log_derivative(x);
      if (!std::isfinite(res.real()) || !std::isfinite(res.imag()) || g == cplx{}) return std::nullopt;
      const cplx dx = res / g;
      x -= dx;
      if (std::abs(res) <= 1e-13 || std::abs(dx) <= 1e-14 * (1.0 + std::abs(x))) {
        const cplx final_res = map.log_ratio(x, target);
        if (std::abs(final_res) <= 1e-11) return std::make_pair(x, it);
      }
    }
    return std::nullopt;
  }

  static cplx snap(const ChartMap& map, cplx x, double c, double theta) {
    auto r = correct(map, x, c, theta, 50);
    if (!r) throw NumericError("tracer: could not place the starting point on the level curve");
    return r->first;
  }

  std::string nearest_critical_description(cplx z_plane) const {
    std::ostringstream os;
    double best = std::numeric_limits<double>::infinity();
    int idx = -1;
    for (std::size_t i = 0; i < qd_.zeros.size(); ++i) {
      if (qd_.zeros[i].at_infinity) continue;
      const double d = std::abs(qd_.zeros[i].location - z_plane);
      if (d < best) {
        best = d;
        idx = static_cast<int>(i);
      }
    }
    if (idx >= 0) os << "nearest critical point " << qd_.zeros[static_cast<std::size_t>(idx)].location;
    else os << "no finite critical point";
    return os.str();
  }

  Trajectory march(const MarchInput& in) const {
    constexpr double kCurvature = 0.05;  // arc-length step / local curvature radius
    constexpr double kMaxTurn = 0.05;    // max change of arg r per step
    constexpr int kMaxSteps = 400000;
    const int max_marks = 2 * (qd_.source.p().degree() + qd_.source.q().degree()) + 4;

    Trajectory t;
    t.level = in.level;
    const ChartMap* map = in.chart == Chart::Plane ? &plane_ : &inverted_;
    cplx x = in.x;
    double progress = 0.0;  // accumulated |change of arg r|
    int next_mark = 1;
    bool armed = in.source < 0;
    double h = tol_.step_min;

    auto push = [&](cplx xc) {
      if (map->chart() == Chart::Plane) t.points.push_back(xc);
      else if (xc != cplx{}) t.points.push_back(1.0 / xc);
    };
    push(x);

    for (int step = 0; step < kMaxSteps; ++step) {
      const auto [g, gp] = map->log_derivative2(x);
      const double ag = std::abs(g);
      if (!(ag > 0.0) || !std::isfinite(ag))
        throw NumericError("tracer: trajectory stalled; " + nearest_critical_description(map->to_plane(x)));
      const double kappa = std::abs(gp) / ag;
      double h_try = std::min({h * 1.5, tol_.step_max, kappa > 0.0 ? kCurvature / kappa : tol_.step_max});
      double dth = std::min(h_try * ag, kMaxTurn);
      bool landing = false;
      if (in.seed) {
        const double rem = next_mark * kTwoPi - progress;
        if (dth >= rem - 1e-12) {
          dth = rem;
          landing = true;
        }
      }

      cplx xn;
      for (;;) {
        const double hh = dth / ag;
        if (hh < 1e-13 * (1.0 + std::abs(x)))
          throw NumericError("tracer: step collapse; " + nearest_critical_description(map->to_plane(x)));
        const double s = in.dir * dth;
        const cplx xm = x + cplx(0.0, 0.5 * s) / g;
        const cplx gm = map->log_derivative(xm);
        const cplx xp = x + cplx(0.0, s) / gm;
        const auto r = correct(*map, xp, in.level, in.theta + in.dir * (progress + dth), 3);
        if (r && std::abs(r->first - xp) <= 0.2 * hh + 1e-14 * (1.0 + std::abs(x))) {
          xn = r->first;
          break;
        }
        dth *= 0.5;
        landing = false;
      }
      h = dth / ag;
      x = xn;
      progress += dth;
      push(x);

      // Chart switch with hysteresis.
      if (map->chart() == Chart::Plane && std::abs(x) > switch_radius_) {
        map = &inverted_;
        x = 1.0 / x;
      } else if (map->chart() == Chart::Inverted && std::abs(x) > 2.0 / switch_radius_) {
        map = &plane_;
        x = 1.0 / x;
      }

      // Capture by a critical point on the same level.
      int hit = -1;
      for (std::size_t vi = 0; vi < vertices_.size(); ++vi) {
        const Vertex& v = vertices_[vi];
        if (v.chart != map->chart()) continue;
        if (!same_modulus(v.level, in.level, std::max(tol_.modulus_rel, 1e-9))) continue;
        const double d = std::abs(x - v.pos);
        if (static_cast<int>(vi) == in.source && !armed) {
          if (d > v.capture) armed = true;
          continue;
        }
        if (d < v.capture) {
          if (hit >= 0) throw NumericError("tracer: capture ambiguity between two critical points");
          hit = static_cast<int>(vi);
        }
      }
      if (hit >= 0) {
        const Vertex& v = vertices_[static_cast<std::size_t>(hit)];
        const double approach = std::arg(x - v.pos);
        const int want_parity = in.dir > 0 ? 1 : 0;
        int best = -1;
        double best_err = std::numeric_limits<double>::infinity();
        for (int j = want_parity; j < v.m + 2; j += 2) {
          const double e = std::abs(wrap_angle(approach - ray_angle(hit, j)));
          if (e < best_err) {
            best_err = e;
            best = j;
          }
        }
        if (best_err > kTwoPi / (4.0 * (v.m + 2)))
          throw NumericError("tracer: approach direction does not match any ray; " +
                             nearest_critical_description(map->to_plane(x)));
        if (!v.at_infinity) t.points.push_back(v.pos);
        t.end = {EndpointKind::CriticalPoint, hit, best};
        // arg r at the vertex itself is the phase of the critical value.
        t.total_arg_change = progress + std::abs(wrap_angle(v.phase - std::arg(map->value(x))));
        return t;
      }

      if (landing) {
        const ChartMap& sm = in.seed_chart == Chart::Plane ? plane_ : inverted_;
        const cplx here = sm.from_plane(map->to_plane(x));
        if (std::abs(here - *in.seed) <= 1e-7 * (1.0 + std::abs(*in.seed))) {
          t.points.back() = sm.to_plane(*in.seed);
          t.end = {EndpointKind::ClosedLoop, -1, -1};
          t.total_arg_change = progress;
          return t;
        }
        if (++next_mark > max_marks) throw NumericError("tracer: level curve did not close");
      }
    }
    throw NumericError("tracer: trajectory did not terminate within the step budget");
  }

  std::vector<cplx> level_candidates(double c, const Window& w) const {
    const double logc = std::log(c);
    auto f = [&](cplx z) { return std::log(std::abs(qd_.source(z))) - logc; };
    auto bisect = [&](cplx a, cplx b, double fa) {
      for (int i = 0; i < 60; ++i) {
        const cplx m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    };
    std::vector<cplx> out;
    auto scan = [&](cplx a, cplx b, double fa, double fb) {
      if (std::isfinite(fa) && std::isfinite(fb) && (fa < 0.0) != (fb < 0.0)) out.push_back(bisect(a, b, fa));
    };

    // Rays from every zero and pole of r inside the window; every component of the
    // level set separates some zero or pole from oo or from another zero/pole.
    const double scale = qd_.root_scale;
    for (const DoublePole& a : qd_.poles) {
      if (!w.contains(a.location)) continue;
      for (int d = 0; d < 4; ++d) {
        const cplx dir = std::polar(1.0, 0.1 + d * kPi / 2);
        // exit distance from the window along dir
        double tmax = std::numeric_limits<double>::infinity();
        if (dir.real() > 0) tmax = std::min(tmax, (w.xmax - a.location.real()) / dir.real());
        if (dir.real() < 0) tmax = std::min(tmax, (w.xmin - a.location.real()) / dir.real());
        if (dir.imag() > 0) tmax = std::min(tmax, (w.ymax - a.location.imag()) / dir.imag());
        if (dir.imag() < 0) tmax = std::min(tmax, (w.ymin - a.location.imag()) / dir.imag());
        double t0 = 1e-10 * scale;
        cplx z0 = a.location + t0 * dir;
        double f0 = f(z0);
        for (double tt = t0 * 1.03; tt < tmax; tt *= 1.03) {
          const cplx z1 = a.location + std::min(tt, tmax) * dir;
          const double f1 = f(z1);
          scan(z0, z1, f0, f1);
          z0 = z1;
          f0 = f1;
        }
      }
    }

    // Coarse grid sign changes.
    constexpr int kGrid = 96;
    std::vector<double> vals(static_cast<std::size_t>((kGrid + 1) * (kGrid + 1)));
    auto node = [&](int i, int j) {
      return cplx(w.xmin + w.width() * i / kGrid, w.ymin + w.height() * j / kGrid);
    };
    for (int i = 0; i <= kGrid; ++i)
      for (int j = 0; j <= kGrid; ++j) vals[static_cast<std::size_t>(i * (kGrid + 1) + j)] = f(node(i, j));
    auto val = [&](int i, int j) { return vals[static_cast<std::size_t>(i * (kGrid + 1) + j)]; };
    for (int i = 0; i <= kGrid; ++i)
      for (int j = 0; j <= kGrid; ++j) {
        if (i < kGrid) scan(node(i, j), node(i + 1, j), val(i, j), val(i + 1, j));
        if (j < kGrid) scan(node(i, j), node(i, j + 1), val(i, j), val(i, j + 1));
      }
    return out;
  }

  // A point on the curve lies within a small fraction of a chord of the polyline.
  static bool on_polyline(cplx p, const std::vector<cplx>& line) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      const double len = std::abs(line[i + 1] - line[i]);
      if (point_segment_distance(p, line[i], line[i + 1]) <= 0.1 * len + 1e-12 * (1.0 + std::abs(p)))
        return true;
    }
    return false;
  }

  QuadraticDifferential qd_;
  Tolerances tol_;
  ChartMap plane_, inverted_;
  double switch_radius_ = 10.0;
  std::vector<Vertex> vertices_;
};

// Free-function form: trace |r| = c through seed.
inline Trajectory trace_level(const RationalMap& r, double c, cplx seed, const Tolerances& tol = {}) {
  const QuadraticDifferential qd = build(r, tol);
  return Tracer(qd, tol).trace_level(c, seed);
}

struct ArgReport {
  bool monotone = true;
  int offending_index = -1;     // first sample where arg r fails to increase
  double total_change = 0.0;    // unwrapped change of arg r along the samples
  bool closed = false;
  double expected_change = 0.0; // 2 pi sum m_a wind(loop, a), closed loops only
  bool integer_multiple = true; // closed loops: total is 2 pi k within 1e-6
};

// Recomputes arg r along a trajectory and checks it is strictly increasing. For
// closed loops the total is compared with the argument principle.
inline ArgReport arg_monotonicity_check(const Trajectory& t, const QuadraticDifferential& qd) {
  ArgReport rep;
  std::vector<double> a;
  a.reserve(t.points.size());
  for (cplx z : t.points) a.push_back(std::arg(qd.source(z)));
  a = unwrap(a);
  const std::size_t n = a.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = a[i + 1] - a[i];
    const bool touches_vertex = (i == 0 && t.start.kind == EndpointKind::CriticalPoint) ||
                                (i + 2 == n && t.end.kind == EndpointKind::CriticalPoint);
    if (d > 0.0 || (touches_vertex && d > -1e-12)) continue;
    rep.monotone = false;
    rep.offending_index = static_cast<int>(i + 1);
    break;
  }
  rep.total_change = n ? a.back() - a.front() : 0.0;
  rep.closed = t.closed();
  if (rep.closed) {
    const double k = std::round(rep.total_change / kTwoPi);
    rep.integer_multiple = std::abs(rep.total_change - k * kTwoPi) <= 1e-6;
    double expected = 0.0;
    for (const DoublePole& p : qd.poles)
      expected += p.signed_multiplicity * winding_number(t.points, p.location);
    rep.expected_change = kTwoPi * expected;
    if (std::abs(rep.expected_change - rep.total_change) > 1e-6) rep.integer_multiple = false;
  }
  return rep;
}

}  // namespace qdl
