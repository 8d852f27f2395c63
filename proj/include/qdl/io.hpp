#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "qdl/common.hpp"
#include "qdl/fingerprint.hpp"
#include "qdl/geometry.hpp"
#include "qdl/graph.hpp"
#include "qdl/polynomial.hpp"
#include "qdl/qdmodel.hpp"
#include "qdl/teichmuller.hpp"

namespace qdl {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

// Malformed or out-of-contract command input.
class InputError : public Error {
 public:
  using Error::Error;
};

// ---- parsing ---------------------------------------------------------------

inline cplx parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InputError("expected a number or an [re, im] pair, got " + j.dump());
}

inline std::vector<cplx> parse_complex_list(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<cplx> out;
  for (const json& e : j) out.push_back(parse_complex(e));
  return out;
}

// A polynomial given as an ascending coefficient array, or as an object with
// "coeffs", or with "roots" and an optional "leading".
inline Polynomial parse_polynomial(const json& j) {
  if (j.is_array()) return Polynomial(parse_complex_list(j, "coefficients"));
  if (!j.is_object()) throw InputError("polynomial must be an array or an object");
  if (j.contains("coeffs")) return Polynomial(parse_complex_list(j.at("coeffs"), "coeffs"));
  if (j.contains("roots")) {
    const std::vector<cplx> rs = parse_complex_list(j.at("roots"), "roots");
    const cplx lead = j.contains("leading") ? parse_complex(j.at("leading")) : cplx{1.0};
    if (lead == cplx{}) throw InputError("leading coefficient must be nonzero");
    return Polynomial::from_roots(rs, lead);
  }
  throw InputError("polynomial object needs \"coeffs\" or \"roots\"");
}

inline RationalMap parse_map(const json& j, const Tolerances& tol = {}) {
  if (!j.is_object()) throw InputError("input must be a JSON object");
  Polynomial p, q = Polynomial::constant(1.0);
  if (j.contains("p")) p = parse_polynomial(j.at("p"));
  else p = parse_polynomial(j);
  if (j.contains("q")) q = parse_polynomial(j.at("q"));
  for (cplx c : p.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InputError("coefficients must be finite");
  for (cplx c : q.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InputError("coefficients must be finite");
  try {
    return RationalMap(p, q, tol.cluster);
  } catch (const PreconditionError& e) {
    throw InputError(e.what());
  }
}

// ---- serialization ---------------------------------------------------------

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Polynomial& p) {
  json a = json::array();
  for (cplx c : p.coeffs()) a.push_back(to_json(c));
  return a;
}

inline json to_json(const std::vector<cplx>& pts) {
  json a = json::array();
  for (cplx z : pts) a.push_back(to_json(z));
  return a;
}

inline json to_json(const Tolerances& t) {
  return {{"root_residual", t.root_residual}, {"cluster", t.cluster},         {"modulus_rel", t.modulus_rel},
          {"level_guard", t.level_guard},     {"trace", t.trace},             {"step_min", t.step_min},
          {"step_max", t.step_max},           {"launch_factor", t.launch_factor}, {"capture_factor", t.capture_factor},
          {"angle_snap_deg", t.angle_snap_deg}, {"map_accuracy", t.map_accuracy}, {"fingerprint", t.fingerprint},
          {"samples", t.samples}};
}

inline json to_json(const BlaschkeProduct& b) {
  json f = json::array();
  for (const BlaschkeFactor& x : b.factors) f.push_back({{"a", to_json(x.a)}, {"multiplicity", x.multiplicity}});
  return {{"theta", b.theta}, {"factors", f}};
}

inline json input_echo(const RationalMap& r) { return {{"p", to_json(r.p())}, {"q", to_json(r.q())}}; }

inline json qd_summary(const QuadraticDifferential& qd) {
  json zeros = json::array();
  for (const CriticalPoint& z : qd.zeros) {
    json e = {{"at_infinity", z.at_infinity}, {"multiplicity", z.multiplicity}};
    if (!z.at_infinity) e["location"] = to_json(z.location);
    zeros.push_back(e);
  }
  json poles = json::array();
  for (const DoublePole& a : qd.poles)
    poles.push_back({{"location", to_json(a.location)}, {"signed_multiplicity", a.signed_multiplicity}, {"residue", a.residue}});
  json inf = {{"kind", to_string(qd.infinity.kind)}, {"order", qd.infinity.order}};
  if (qd.infinity_is_pole()) inf["residue"] = qd.infinity.residue;
  return {{"degree", qd.source.degree()},
          {"numerator", to_json(qd.numerator)},
          {"zeros", zeros},
          {"double_poles", poles},
          {"infinity", inf},
          {"divisor_degree", qd.divisor_degree()}};
}

inline json to_json(const CriticalValueTable& t) {
  json a = json::array();
  for (const CriticalValue& v : t) {
    json e = {{"zero", v.zero_index}, {"at_infinity", v.at_infinity}};
    if (!v.at_infinity) e["location"] = to_json(v.location);
    e["value"] = to_json(v.value);
    e["modulus"] = v.modulus;
    a.push_back(e);
  }
  return a;
}

inline json to_json(const CriticalGraph& g) {
  json vs = json::array();
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const GraphVertex& x = g.vertices[v];
    json e = {{"zero", x.zero}, {"at_infinity", x.at_infinity}, {"multiplicity", x.multiplicity},
              {"level", x.level}, {"component", g.component[v]}};
    if (!x.at_infinity) e["location"] = to_json(x.location);
    vs.push_back(e);
  }
  json es = json::array();
  for (const GraphEdge& e : g.edges)
    es.push_back({{"from", e.from}, {"from_ray", e.from_ray}, {"to", e.to}, {"to_ray", e.to_ray},
                  {"polyline", to_json(e.path.points)}});
  return {{"vertices", vs}, {"edges", es}, {"components", g.component_count}};
}

inline json census_json(const DomainConfiguration& dc) {
  json faces = json::array();
  for (const Face& f : dc.faces) {
    json poles = json::array();
    for (const FacePole& p : f.poles) {
      json e = {{"at_infinity", p.at_infinity}, {"signed_multiplicity", p.signed_multiplicity}};
      if (!p.at_infinity) e["location"] = to_json(p.location);
      poles.push_back(e);
    }
    faces.push_back({{"kind", to_string(f.kind)}, {"boundary_walks", f.boundary}, {"double_poles", poles}});
  }
  return {{"circle", dc.count(FaceKind::Circle)},
          {"ring", dc.count(FaceKind::Ring)},
          {"euler_characteristic", dc.euler_characteristic},
          {"faces", faces}};
}

inline json to_json(const TheoremReport& r) {
  json j = {{"theorem", r.theorem}, {"residual", r.residual}, {"theta", r.theta},
            {"interior", to_json(r.interior)}, {"exterior", to_json(r.exterior)}};
  if (r.literal_residual) j["literal_residual"] = *r.literal_residual;
  j["notes"] = r.notes;
  return j;
}

inline json to_json(const Fingerprint& fp) {
  json samples = json::array();
  for (std::size_t j = 0; j < fp.eta_minus.size(); ++j) samples.push_back({fp.eta_minus[j], fp.eta_plus[j]});
  return {{"n", fp.n}, {"alpha", fp.alpha}, {"beta", fp.beta}, {"monotone", fp.monotone()}, {"samples", samples}};
}

// ---- SVG -------------------------------------------------------------------

struct SvgPalette {
  const char* graph = "#1f4e79";
  const char* level = "#c05000";
  const char* zero = "#2e7d32";
  const char* pole = "#b71c1c";
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Path data with y flipped; pieces far outside the view are dropped.
inline std::string path_data(const std::vector<cplx>& pts, const Window& view) {
  const Window clip = Window::centered(cplx(0.5 * (view.xmin + view.xmax), 0.5 * (view.ymin + view.ymax)),
                                       2.0 * std::max(view.width(), view.height()));
  std::string d;
  bool pen = false;
  for (cplx z : pts) {
    if (!clip.contains(z)) {
      pen = false;
      continue;
    }
    d += pen ? " L" : (d.empty() ? "M" : " M");
    d += fmt(z.real()) + " " + fmt(-z.imag());
    pen = true;
  }
  return d;
}

}  // namespace detail

struct SvgLayers {
  std::vector<std::vector<cplx>> graph;
  std::vector<std::vector<cplx>> levels;
  std::vector<cplx> zeros, poles;
  int vertices = 0, edges = 0, components = 0, circle_faces = 0, ring_faces = 0;
};

inline std::string render_svg(const SvgLayers& layers, const Window& view, const SvgPalette& pal = {}) {
  std::ostringstream os;
  const double stroke = 0.002 * std::max(view.width(), view.height());
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"800\" viewBox=\""
     << detail::fmt(view.xmin) << " " << detail::fmt(-view.ymax) << " " << detail::fmt(view.width()) << " "
     << detail::fmt(view.height()) << "\" data-vertices=\"" << layers.vertices << "\" data-edges=\"" << layers.edges
     << "\" data-components=\"" << layers.components << "\" data-circle-faces=\"" << layers.circle_faces
     << "\" data-ring-faces=\"" << layers.ring_faces << "\">\n";
  os << "<desc>vertices=" << layers.vertices << " edges=" << layers.edges << " components=" << layers.components
     << " circle_faces=" << layers.circle_faces << " ring_faces=" << layers.ring_faces << "</desc>\n";
  os << "<rect x=\"" << detail::fmt(view.xmin) << "\" y=\"" << detail::fmt(-view.ymax) << "\" width=\""
     << detail::fmt(view.width()) << "\" height=\"" << detail::fmt(view.height()) << "\" fill=\"white\"/>\n";
  os << "<g fill=\"none\" stroke-linejoin=\"round\">\n";
  for (const auto& line : layers.levels)
    os << "<path class=\"level\" stroke=\"" << pal.level << "\" stroke-width=\"" << detail::fmt(stroke)
       << "\" stroke-dasharray=\"" << detail::fmt(4 * stroke) << " " << detail::fmt(3 * stroke) << "\" d=\""
       << detail::path_data(line, view) << "\"/>\n";
  for (const auto& line : layers.graph)
    os << "<path class=\"edge\" stroke=\"" << pal.graph << "\" stroke-width=\"" << detail::fmt(stroke) << "\" d=\""
       << detail::path_data(line, view) << "\"/>\n";
  os << "</g>\n";
  const double rad = 3.0 * stroke;
  for (cplx z : layers.zeros)
    os << "<circle class=\"zero\" cx=\"" << detail::fmt(z.real()) << "\" cy=\"" << detail::fmt(-z.imag()) << "\" r=\""
       << detail::fmt(rad) << "\" fill=\"" << pal.zero << "\"/>\n";
  for (cplx z : layers.poles)
    os << "<rect class=\"pole\" x=\"" << detail::fmt(z.real() - rad) << "\" y=\"" << detail::fmt(-z.imag() - rad)
       << "\" width=\"" << detail::fmt(2 * rad) << "\" height=\"" << detail::fmt(2 * rad) << "\" fill=\"" << pal.pole
       << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace qdl
