#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smirnov/blaschke_smirnov.hpp"
#include "smirnov/error.hpp"
#include "smirnov/region_extraction.hpp"
#include "smirnov/synthesis.hpp"
#include "smirnov/valence_tree.hpp"

namespace smirnov::io {

using json = nlohmann::json;
using tree::IntervalExt;
using tree::PlaneValenceTree;
using tree::Sign;

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorCode::ParseError, "io", what); }

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  return j.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalars

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

// [re, im] or a bare real number.
inline cplx complex_from_json(const json& j, const std::string& where = "complex") {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) detail::fail(where + ": expected [re, im]");
  return {detail::number(j[0], where), detail::number(j[1], where)};
}

// Interval endpoints: null stands for the infinite end on its side.
inline json endpoint_to_json(double x) {
  if (std::isinf(x)) return nullptr;
  return x + 0.0;
}

inline double endpoint_from_json(const json& j, bool low, const std::string& where) {
  if (j.is_null()) return low ? -INFINITY : INFINITY;
  return detail::number(j, where);
}

// ---------------------------------------------------------------------------
// Blaschke products and functions

inline json blaschke_to_json(const FiniteBlaschkeProduct& b) {
  json zeros = json::array();
  for (cplx a : b.zeros()) zeros.push_back(complex_to_json(a));
  return {{"zeros", zeros}, {"constant", complex_to_json(b.constant())}};
}

inline FiniteBlaschkeProduct blaschke_from_json(const json& j, const std::string& where = "blaschke") {
  if (!j.is_object()) detail::fail(where + ": expected an object");
  std::vector<cplx> zeros;
  if (j.contains("zeros")) {
    if (!j["zeros"].is_array()) detail::fail(where + ".zeros: expected an array");
    for (const json& z : j["zeros"]) zeros.push_back(complex_from_json(z, where + ".zeros"));
  }
  const cplx c = j.contains("constant") ? complex_from_json(j["constant"], where + ".constant") : cplx(1.0);
  return FiniteBlaschkeProduct(std::move(zeros), c);
}

inline json poly_to_json(const ComplexPolynomial& p) {
  json out = json::array();
  for (cplx c : p.coefficients()) out.push_back(complex_to_json(c));
  return out;
}

inline ComplexPolynomial poly_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) detail::fail(where + ": expected a nonempty coefficient array");
  std::vector<cplx> c;
  for (const json& x : j) c.push_back(complex_from_json(x, where));
  return ComplexPolynomial(std::move(c));
}

// {"b1": ..., "b2": ...} when a Helson pair is known, plus "num" and "den"
// (ascending coefficients) always.
inline json function_to_json(const RationalRealSmirnov& phi) {
  json out;
  if (phi.helson_pair()) {
    out["b1"] = blaschke_to_json(phi.helson_pair()->b1);
    out["b2"] = blaschke_to_json(phi.helson_pair()->b2);
  }
  out["num"] = poly_to_json(phi.num());
  out["den"] = poly_to_json(phi.den());
  return out;
}

inline RationalRealSmirnov function_from_json(const json& j) {
  if (!j.is_object()) detail::fail("function: expected an object");
  if (j.contains("b1") || j.contains("b2")) {
    if (!j.contains("b1") || !j.contains("b2")) detail::fail("function: both b1 and b2 are required");
    return from_blaschke(blaschke_from_json(j["b1"], "b1"), blaschke_from_json(j["b2"], "b2"));
  }
  if (j.contains("num") && j.contains("den"))
    return from_rational(poly_from_json(j["num"], "num"), poly_from_json(j["den"], "den"));
  detail::fail("function: expected {\"b1\", \"b2\"} or {\"num\", \"den\"}");
}

// ---------------------------------------------------------------------------
// Trees

inline json tree_to_json(const PlaneValenceTree& t) {
  json nodes = json::array(), edges = json::array();
  for (const auto& n : t.nodes)
    nodes.push_back({{"id", n.id}, {"sign", std::string(1, tree::sign_char(n.sign))}, {"valence", n.valence}});
  for (const auto& e : t.edges)
    edges.push_back({{"a", e.a},
                     {"b", e.b},
                     {"interval", json::array({endpoint_to_json(e.interval.lo), endpoint_to_json(e.interval.hi)})}});
  return {{"nodes", nodes}, {"edges", edges}};
}

inline PlaneValenceTree tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array())
    detail::fail("tree: expected an object with a \"nodes\" array");
  PlaneValenceTree t;
  for (const json& n : j["nodes"]) {
    if (!n.is_object() || !n.contains("id") || !n["id"].is_string()) detail::fail("tree.nodes: each node needs a string id");
    const std::string sign = n.value("sign", std::string());
    if (sign != "+" && sign != "-") detail::fail("tree.nodes: sign must be \"+\" or \"-\"");
    if (!n.contains("valence") || !n["valence"].is_number_integer()) detail::fail("tree.nodes: valence must be an integer");
    t.nodes.push_back({n["id"].get<std::string>(), sign == "+" ? Sign::Plus : Sign::Minus, n["valence"].get<int>()});
  }
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) detail::fail("tree.edges: expected an array");
    for (const json& e : j["edges"]) {
      if (!e.is_object() || !e.contains("a") || !e.contains("b") || !e["a"].is_string() || !e["b"].is_string())
        detail::fail("tree.edges: each edge needs string endpoints a and b");
      if (!e.contains("interval") || !e["interval"].is_array() || e["interval"].size() != 2)
        detail::fail("tree.edges: interval must be [lo, hi]");
      const IntervalExt iv{endpoint_from_json(e["interval"][0], true, "interval"),
                           endpoint_from_json(e["interval"][1], false, "interval")};
      t.edges.push_back({e["a"].get<std::string>(), e["b"].get<std::string>(), iv});
    }
  }
  return t;
}

inline json violations_to_json(const tree::ValidationReport& rep) {
  json out = json::array();
  for (const auto& v : rep.violations) {
    json x = {{"kind", tree::to_string(v.kind)}, {"nodes", v.nodes}, {"message", v.message}};
    if (v.witness) {
      x["witness"] = endpoint_to_json(*v.witness);
      x["coverage"] = v.coverage;
    }
    out.push_back(x);
  }
  return out;
}

inline json profile_to_json(const tree::ValenceProfile& p) {
  json pieces = json::array();
  const auto& b = p.breakpoints;
  for (std::size_t k = 0; k <= b.size(); ++k) {
    const double lo = k == 0 ? -INFINITY : b[k - 1];
    const double hi = k == b.size() ? INFINITY : b[k];
    pieces.push_back({{"interval", json::array({endpoint_to_json(lo), endpoint_to_json(hi)})},
                      {"valence", p.piece_multiplicity[k]}});
  }
  json points = json::array();
  for (std::size_t k = 0; k < b.size(); ++k) points.push_back({{"x", b[k]}, {"valence", p.point_multiplicity[k]}});
  return {{"v_plus", p.v_plus}, {"v_minus", p.v_minus}, {"pieces", pieces}, {"points", points}};
}

inline json crosscheck_to_json(const extract::CrosscheckReport& r) {
  json mism = json::array();
  for (const auto& m : r.mismatches)
    mism.push_back({{"kind", m.kind}, {"lambda", complex_to_json(m.lambda)}, {"expected", m.expected},
                    {"observed", m.observed}});
  return {{"samples_plus", r.samples_plus}, {"samples_minus", r.samples_minus}, {"samples_real", r.samples_real},
          {"delta", r.delta},           {"ok", r.ok()},                   {"mismatches", mism}};
}

inline json shape_to_json(const tree::ShapeEntry& s) {
  json cons = json::array();
  for (const auto& c : s.constraints)
    cons.push_back({{"node", c.node}, {"edges", c.edges}, {"max_overlap", c.max_overlap}, {"description", c.description}});
  return {{"tree", tree_to_json(s.tree)}, {"constraints", cons}, {"feasible", s.feasible}, {"canonical", s.canonical}};
}

inline json synthesis_to_json(const synth::SynthesisResult& r) {
  json out = {{"status", synth::to_string(r.status)}, {"source", r.source},      {"note", r.note},
              {"evaluations", r.evaluations},           {"extracted", tree_to_json(r.extracted)}};
  out["loss"] = std::isfinite(r.loss) ? json(r.loss) : json(nullptr);
  out["candidate"] = r.candidate ? function_to_json(*r.candidate) : json(nullptr);
  out["error"] = r.error ? json(std::string(to_string(*r.error))) : json(nullptr);
  out["endpoint_error"] = r.endpoint_error ? json(*r.endpoint_error) : json(nullptr);
  return out;
}

inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    detail::fail(source + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// DOT

inline std::string label_number(double x) {
  if (x == INFINITY) return "∞";
  if (x == -INFINITY) return "-∞";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x + 0.0);
  return buf;
}

inline std::string to_dot(const PlaneValenceTree& t, const std::string& name = "valence_tree") {
  std::ostringstream out;
  out << "graph " << name << " {\n  node [shape=box];\n";
  for (const auto& n : t.nodes)
    out << "  \"" << n.id << "\" [label=\"" << (n.sign == Sign::Plus ? "ℂ₊" : "ℂ₋") << ": " << n.valence << "\"];\n";
  for (const auto& e : t.edges)
    out << "  \"" << e.a << "\" -- \"" << e.b << "\" [label=\"(" << label_number(e.interval.lo) << ", "
        << label_number(e.interval.hi) << ")\"];\n";
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// SVG

// Upper regions light, lower regions dark, interfaces black, one label per
// collection at the centroid of its largest region.
inline std::string render_svg(const extract::ExtractionResult& r, int size = 512) {
  const extract::GridPartition& g = r.grid;
  const double scale = size / 2.0;
  const double cell = g.h * scale;
  auto px = [&](cplx z) { return std::make_pair((z.real() + 1.0) * scale, (1.0 - z.imag()) * scale); };
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << ' ' << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int j = 0; j < g.resolution; ++j) {
    int i = 0;
    while (i < g.resolution) {
      const extract::CellClass c = g.cls[static_cast<std::size_t>(j * g.resolution + i)];
      int k = i + 1;
      while (k < g.resolution && g.cls[static_cast<std::size_t>(j * g.resolution + k)] == c) ++k;
      if (c == extract::CellClass::Plus || c == extract::CellClass::Minus) {
        const double y = (g.resolution - 1 - j) * cell;
        out << "<rect x=\"" << i * cell << "\" y=\"" << y << "\" width=\"" << (k - i) * cell << "\" height=\"" << cell
            << "\" fill=\"" << (c == extract::CellClass::Plus ? "#cfe3f7" : "#3b5b8a") << "\"/>\n";
      }
      i = k;
    }
  }
  out << "<circle cx=\"" << scale << "\" cy=\"" << scale << "\" r=\"" << scale
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (const auto& a : r.graph.arcs) {
    if (a.polyline.size() < 2) continue;
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (cplx z : a.polyline) {
      const auto [x, y] = px(z);
      out << x << ',' << y << ' ';
    }
    out << "\"/>\n";
  }
  for (std::size_t k = 0; k < r.collections.size(); ++k) {
    const auto& col = r.collections[k];
    int best = -1, cells = -1;
    for (int id : col.regions) {
      const int c = g.components[static_cast<std::size_t>(id)].cells;
      if (c > cells) {
        cells = c;
        best = id;
      }
    }
    if (best < 0) continue;
    const auto [x, y] = px(g.components[static_cast<std::size_t>(best)].centroid);
    out << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"14\" text-anchor=\"middle\" fill=\""
        << (col.sign == Sign::Plus ? "black" : "white") << "\">" << r.tree.nodes[k].id << " ("
        << (col.sign == Sign::Plus ? "ℂ₊" : "ℂ₋") << ": " << col.valence << ")</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace smirnov::io
