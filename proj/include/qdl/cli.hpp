#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "qdl/fingerprint.hpp"
#include "qdl/graph.hpp"
#include "qdl/io.hpp"
#include "qdl/oracle.hpp"
#include "qdl/qdmodel.hpp"
#include "qdl/teichmuller.hpp"
#include "qdl/tracer.hpp"

namespace qdl::cli {

enum ExitCode : int { kOk = 0, kNumeric = 1, kVerification = 2, kUsage = 64 };

struct Options {
  std::string input = "-";
  std::vector<double> levels;
  std::vector<double> window;  // xmin, xmax, ymin, ymax
  double pitch = 0.0;
  std::string out;
  Tolerances tol;
};

namespace detail {

inline json read_input(const std::string& path, std::istream& in) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open input file " + path);
    text.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("input is not valid JSON: ") + e.what());
  }
}

inline Window resolve_window(const Options& o, const QuadraticDifferential& qd) {
  if (o.window.empty()) return default_window(qd);
  if (o.window.size() != 4 || !(o.window[1] > o.window[0]) || !(o.window[3] > o.window[2]))
    throw InputError("--window needs xmin,xmax,ymin,ymax with xmin < xmax and ymin < ymax");
  return {o.window[0], o.window[1], o.window[2], o.window[3]};
}

inline void check_levels(const Options& o) {
  for (double c : o.levels)
    if (!(c > 0.0) || !std::isfinite(c)) throw InputError("--level values must be positive");
}

inline void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InputError("cannot write " + o.out);
  f << text;
}

inline json provenance(const Options& o) {
  return {{"tool", "qdl"}, {"version", kVersion}, {"tolerances", to_json(o.tol)}};
}

struct Checks {
  json list = json::array();
  bool ok = true;
  void add(const std::string& name, bool pass, json detail = json::object()) {
    json e = {{"check", name}, {"pass", pass}};
    if (!detail.empty()) e["detail"] = detail;
    list.push_back(e);
    ok = ok && pass;
  }
};

// Structural analysis shared by analyze and verify.
inline json analysis(const Options& o, const RationalMap& r, Checks& checks, bool with_polylines) {
  const QuadraticDifferential qd = build(r, o.tol);
  const CriticalValueTable table = critical_values(qd);
  json rep;
  rep["input"] = input_echo(r);
  rep["differential"] = qd_summary(qd);
  rep["critical_values"] = to_json(table);

  const CriticalGraph g = build_graph(qd, o.tol);
  const bool predicate = connectivity_predicate(table, o.tol.modulus_rel);
  rep["connectivity"] = {{"predicate", predicate ? "connected" : "disconnected"},
                         {"traced_components", g.component_count}};
  checks.add("ray_handshake", 2 * static_cast<int>(g.edges.size()) == g.ray_total());
  checks.add("connectivity_matches_trace", predicate == (g.component_count == 1));

  json pairs = json::array();
  bool pairs_ok = true;
  for (const auto& [i, j] : max_modulus_pairs(table, o.tol.modulus_rel)) {
    const bool found = connecting_trajectory(g, i, j).has_value();
    pairs_ok = pairs_ok && found;
    pairs.push_back({{"pair", {i, j}}, {"connected", found}});
  }
  rep["max_modulus_pairs"] = pairs;
  checks.add("max_modulus_pairs_connected", pairs_ok);

  bool mono = true;
  for (const GraphEdge& e : g.edges) mono = mono && arg_monotonicity_check(e.path, qd).monotone;
  checks.add("edge_arg_monotone", mono);

  json graph = to_json(g);
  if (!with_polylines)
    for (json& e : graph["edges"]) e.erase("polyline");
  rep["graph"] = graph;

  const DomainConfiguration dc = domain_configurations(g, qd);
  rep["domains"] = census_json(dc);
  checks.add("euler", dc.euler_characteristic == 1 + g.component_count,
             {{"v_minus_e_plus_f", dc.euler_characteristic}, {"components", g.component_count}});
  checks.add("circle_faces_match_double_poles", dc.count(FaceKind::Circle) == qd.double_pole_count());

  json teich = json::array();
  bool teich_ok = true;
  for (std::size_t w = 0; w < dc.walks.size(); ++w) {
    const QDPolygon poly = polygon_from_face(dc, static_cast<int>(w), g, qd, o.tol);
    const TeichmullerSum s = teichmuller_sum(poly);
    teich_ok = teich_ok && s.holds();
    teich.push_back({{"walk", w}, {"corners", poly.corners.size()}, {"interior", poly.interior.size()},
                     {"lhs", s.lhs}, {"rhs", s.rhs}, {"pass", s.holds()}});
  }
  rep["teichmuller"] = teich;
  checks.add("teichmuller", teich_ok);

  if (r.is_polynomial()) rep["properness"] = to_string(properness_test(qd, 1.0, o.tol.modulus_rel));

  if (!o.levels.empty()) {
    const Window w = resolve_window(o, qd);
    const double pitch = o.pitch > 0.0 ? o.pitch : w.width() / 1024.0;
    json levels = json::array();
    for (double c : o.levels) {
      const LemniscateCensus census = lemniscate_components(qd, c, w, o.tol);
      const GridLevelSet grid = grid_level(r, c, census.window, census.window.width() / w.width() * pitch);
      json e = {{"level", c}, {"traced_components", census.count}, {"oracle_components", grid.component_count}};
      checks.add("level_components", census.count == grid.component_count, e);
      bool loops_ok = true;
      for (const Trajectory& t : census.curves) {
        const ArgReport a = arg_monotonicity_check(t, qd);
        loops_ok = loops_ok && a.monotone && a.integer_multiple;
      }
      checks.add("level_arg_monotone", loops_ok, {{"level", c}});
      levels.push_back(e);
    }
    rep["levels"] = levels;
  }
  return rep;
}

inline int cmd_analyze(const Options& o, std::istream& in, std::ostream& out) {
  check_levels(o);
  const RationalMap r = parse_map(read_input(o.input, in), o.tol);
  Checks checks;
  json rep = analysis(o, r, checks, true);
  rep["checks"] = checks.list;
  rep["provenance"] = provenance(o);
  emit(o, rep.dump(2) + "\n", out);
  return checks.ok ? kOk : kVerification;
}

inline int cmd_verify(const Options& o, std::istream& in, std::ostream& out) {
  check_levels(o);
  const RationalMap r = parse_map(read_input(o.input, in), o.tol);
  Checks checks;
  json rep = analysis(o, r, checks, false);
  json slim = {{"input", rep["input"]}, {"checks", checks.list}, {"pass", checks.ok}, {"provenance", provenance(o)}};
  emit(o, slim.dump(2) + "\n", out);
  return checks.ok ? kOk : kVerification;
}

inline int cmd_render(const Options& o, std::istream& in, std::ostream& out) {
  check_levels(o);
  const RationalMap r = parse_map(read_input(o.input, in), o.tol);
  const QuadraticDifferential qd = build(r, o.tol);
  const Window view = resolve_window(o, qd);
  const CriticalGraph g = build_graph(qd, o.tol);
  const DomainConfiguration dc = domain_configurations(g, qd);
  SvgLayers layers;
  for (const GraphEdge& e : g.edges) layers.graph.push_back(e.path.points);
  const Tracer tracer(qd, o.tol);
  for (double c : o.levels)
    for (Trajectory& t : tracer.level_set(c, view)) layers.levels.push_back(std::move(t.points));
  for (const CriticalPoint& z : qd.zeros)
    if (!z.at_infinity) layers.zeros.push_back(z.location);
  for (const DoublePole& a : qd.poles) layers.poles.push_back(a.location);
  layers.vertices = static_cast<int>(g.vertices.size());
  layers.edges = static_cast<int>(g.edges.size());
  layers.components = g.component_count;
  layers.circle_faces = dc.count(FaceKind::Circle);
  layers.ring_faces = dc.count(FaceKind::Ring);
  emit(o, render_svg(layers, view), out);
  return kOk;
}

inline int cmd_fingerprint(const Options& o, std::istream& in, std::ostream& out) {
  check_levels(o);
  if (o.levels.size() > 1) throw InputError("fingerprint takes at most one --level");
  const RationalMap r = parse_map(read_input(o.input, in), o.tol);
  if (!r.is_polynomial()) throw InputError("fingerprint needs a polynomial (no \"q\")");
  const double level = o.levels.empty() ? 1.0 : o.levels.front();
  const Polynomial p = (1.0 / level) * r.p();
  const RationalMap pn(p);
  const QuadraticDifferential qd = build(pn, o.tol);
  for (const CriticalPoint& z : qd.zeros)
    if (std::abs(std::abs(z.value) - 1.0) <= o.tol.level_guard) {
      std::ostringstream os;
      os << "fingerprint: level " << level << " is not smooth; critical value " << z.value.real() * level
         << (z.value.imag() * level >= 0 ? "+" : "") << z.value.imag() * level << "i has that modulus";
      throw PreconditionError(os.str());
    }
  const Window w = resolve_window(o, qd);
  const LemniscateCensus census = lemniscate_components(qd, 1.0, w, o.tol);
  json comps = json::array();
  bool ok = true;
  for (const Trajectory& loop : census.curves) {
    const ComponentFingerprint cf = fingerprint_component(p, loop, o.tol);
    json inside = json::array();
    for (const Root& z : cf.census.inside) inside.push_back({{"root", to_json(z.location)}, {"multiplicity", z.multiplicity}});
    json e = {{"roots_inside", inside}, {"map_accuracy", cf.map_accuracy}};
    if (cf.report) {
      const bool pass = cf.report->passed(o.tol.fingerprint) && cf.fp.monotone();
      ok = ok && pass;
      e["status"] = pass ? "pass" : "fail";
      e["result"] = to_json(*cf.report);
    } else {
      e["status"] = "out of theorem scope";
    }
    e["fingerprint"] = to_json(cf.fp);
    comps.push_back(e);
  }
  json rep = {{"input", input_echo(r)},
              {"level", level},
              {"level_normalized", level != 1.0},
              {"components", comps},
              {"pass", ok},
              {"provenance", provenance(o)}};
  emit(o, rep.dump(2) + "\n", out);
  return ok ? kOk : kVerification;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadratic differentials and lemniscates of rational maps"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--input,-i", o.input, "Input JSON file, or - for stdin");
    sub->add_option("--level", o.levels, "Lemniscate level c (repeatable)");
    sub->add_option("--window", o.window, "Window xmin,xmax,ymin,ymax")->delimiter(',')->expected(4);
    sub->add_option("--pitch", o.pitch, "Oracle grid pitch");
    sub->add_option("--out,-o", o.out, "Output file (default stdout)");
    sub->add_option("--samples", o.tol.samples, "Boundary samples for conformal maps");
    sub->add_option("--tol-root", o.tol.root_residual, "Root residual tolerance");
    sub->add_option("--tol-cluster", o.tol.cluster, "Root clustering tolerance");
    sub->add_option("--tol-modulus", o.tol.modulus_rel, "Relative tolerance for equal moduli");
    sub->add_option("--tol-level-guard", o.tol.level_guard, "Distance of levels from critical moduli");
    sub->add_option("--tol-trace", o.tol.trace, "Relative level error of traced curves");
    sub->add_option("--tol-step-min", o.tol.step_min, "Minimum tracer step");
    sub->add_option("--tol-step-max", o.tol.step_max, "Maximum tracer step");
    sub->add_option("--tol-launch", o.tol.launch_factor, "Launch radius factor");
    sub->add_option("--tol-capture", o.tol.capture_factor, "Capture radius factor");
    sub->add_option("--tol-angle-snap", o.tol.angle_snap_deg, "Corner angle snap window in degrees");
    sub->add_option("--tol-map", o.tol.map_accuracy, "Disk map accuracy relative to diameter");
    sub->add_option("--tol-fingerprint", o.tol.fingerprint, "Theorem residual threshold");
  };
  CLI::App* analyze = app.add_subcommand("analyze", "Critical data, graph, domains and Teichmuller checks (JSON)");
  CLI::App* render = app.add_subcommand("render", "Critical graph and level curves (SVG)");
  CLI::App* finger = app.add_subcommand("fingerprint", "Fingerprint of |p| = c and theorem residuals (JSON)");
  CLI::App* verify = app.add_subcommand("verify", "Run all checks and report pass/fail (JSON)");
  for (CLI::App* s : {analyze, render, finger, verify}) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }
  if (o.tol.samples < 16) {
    err << "error: --samples must be at least 16\n";
    return kUsage;
  }

  try {
    if (analyze->parsed()) return detail::cmd_analyze(o, in, out);
    if (render->parsed()) return detail::cmd_render(o, in, out);
    if (finger->parsed()) return detail::cmd_fingerprint(o, in, out);
    return detail::cmd_verify(o, in, out);
  } catch (const InputError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace qdl::cli
