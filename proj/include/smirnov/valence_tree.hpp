#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smirnov/error.hpp"
#include "smirnov/interval_packing.hpp"

namespace smirnov::tree {

enum class Sign { Plus, Minus };

inline Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
inline char sign_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }

struct SignedNode {
  std::string id;
  Sign sign = Sign::Plus;
  int valence = 1;
  friend bool operator==(const SignedNode&, const SignedNode&) = default;
};

struct TreeEdge {
  std::string a;
  std::string b;
  IntervalExt interval;
  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

struct PlaneValenceTree {
  std::vector<SignedNode> nodes;
  std::vector<TreeEdge> edges;

  std::optional<std::size_t> index_of(const std::string& id) const {
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (nodes[k].id == id) return k;
    return std::nullopt;
  }
  int total_valence(Sign s) const {
    int v = 0;
    for (const SignedNode& n : nodes)
      if (n.sign == s) v += n.valence;
    return v;
  }
  std::vector<IntervalExt> incident_intervals(const std::string& id) const {
    std::vector<IntervalExt> out;
    for (const TreeEdge& e : edges)
      if (e.a == id || e.b == id) out.push_back(e.interval);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  EmptyTree,
  DuplicateNode,
  UnknownNode,
  BadValence,
  EmptyInterval,
  SelfLoop,
  ParallelEdges,
  Cycle,
  Disconnected,
  SameSignAdjacent,
  PackingExceeded,
  NoFreeInterval,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::EmptyTree: return "EmptyTree";
    case ViolationKind::DuplicateNode: return "DuplicateNode";
    case ViolationKind::UnknownNode: return "UnknownNode";
    case ViolationKind::BadValence: return "BadValence";
    case ViolationKind::EmptyInterval: return "EmptyInterval";
    case ViolationKind::SelfLoop: return "SelfLoop";
    case ViolationKind::ParallelEdges: return "ParallelEdges";
    case ViolationKind::Cycle: return "Cycle";
    case ViolationKind::Disconnected: return "Disconnected";
    case ViolationKind::SameSignAdjacent: return "SameSignAdjacent";
    case ViolationKind::PackingExceeded: return "PackingExceeded";
    case ViolationKind::NoFreeInterval: return "NoFreeInterval";
  }
  return "Unknown";
}

// NotATree groups the structural kinds.
inline bool is_structural(ViolationKind k) {
  return k == ViolationKind::SelfLoop || k == ViolationKind::ParallelEdges || k == ViolationKind::Cycle ||
         k == ViolationKind::Disconnected;
}

struct Violation {
  ViolationKind kind;
  std::vector<std::string> nodes;
  std::optional<double> witness;  // a point of the line exhibiting the violation
  int coverage = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(), [k](const Violation& v) { return v.kind == k; });
  }
  bool not_a_tree() const {
    return std::any_of(violations.begin(), violations.end(), [](const Violation& v) { return is_structural(v.kind); });
  }
};

inline std::string format_number(double x) {
  if (x == INFINITY) return "inf";
  if (x == -INFINITY) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline ValidationReport validate(const PlaneValenceTree& t) {
  ValidationReport rep;
  auto add = [&](ViolationKind k, std::vector<std::string> nodes, std::string msg, std::optional<double> w = {},
                 int cov = 0) { rep.violations.push_back({k, std::move(nodes), w, cov, std::move(msg)}); };

  if (t.nodes.empty()) {
    add(ViolationKind::EmptyTree, {}, "tree has no nodes");
    return rep;
  }
  std::set<std::string> ids;
  for (const SignedNode& n : t.nodes) {
    if (!ids.insert(n.id).second) add(ViolationKind::DuplicateNode, {n.id}, "node id used twice");
    if (n.valence < 1) add(ViolationKind::BadValence, {n.id}, "valence must be at least 1");
  }
  bool edges_resolved = true;
  for (const TreeEdge& e : t.edges) {
    if (!ids.count(e.a) || !ids.count(e.b)) {
      add(ViolationKind::UnknownNode, {e.a, e.b}, "edge refers to an unknown node");
      edges_resolved = false;
      continue;
    }
    if (!e.interval.valid())
      add(ViolationKind::EmptyInterval, {e.a, e.b},
          "interval (" + format_number(e.interval.lo) + ", " + format_number(e.interval.hi) + ") is empty");
  }
  if (!edges_resolved) return rep;

  // Structure.
  const std::size_t n = t.nodes.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::set<std::pair<std::string, std::string>> seen_pairs;
  for (const TreeEdge& e : t.edges) {
    if (e.a == e.b) {
      add(ViolationKind::SelfLoop, {e.a}, "edge joins a node to itself");
      continue;
    }
    const auto key = std::minmax(e.a, e.b);
    if (!seen_pairs.insert({key.first, key.second}).second) {
      add(ViolationKind::ParallelEdges, {key.first, key.second}, "more than one edge joins these nodes");
      continue;
    }
    const std::size_t ia = *t.index_of(e.a), ib = *t.index_of(e.b);
    if (find(ia) == find(ib)) add(ViolationKind::Cycle, {e.a, e.b}, "edge closes a cycle");
    else parent[find(ia)] = find(ib);
    if (t.nodes[ia].sign == t.nodes[ib].sign)
      add(ViolationKind::SameSignAdjacent, {e.a, e.b}, "adjacent nodes carry the same sign");
  }
  std::set<std::size_t> roots;
  for (std::size_t k = 0; k < n; ++k) roots.insert(find(k));
  if (roots.size() > 1) add(ViolationKind::Disconnected, {}, std::to_string(roots.size()) + " components");

  // Packing and free intervals, on valid intervals only.
  bool some_free = false;
  for (const SignedNode& node : t.nodes) {
    std::vector<IntervalExt> inc;
    for (const IntervalExt& iv : t.incident_intervals(node.id))
      if (iv.valid()) inc.push_back(iv);
    const CoverageSweep s = sweep_coverage(inc);
    if (s.max_coverage > node.valence)
      add(ViolationKind::PackingExceeded, {node.id},
          std::to_string(s.max_coverage) + " incident intervals overlap at " + format_number(s.max_witness) +
              " but valence is " + std::to_string(node.valence),
          s.max_witness, s.max_coverage);
    if (s.min_coverage <= node.valence - 1) some_free = true;
  }
  if (!some_free)
    add(ViolationKind::NoFreeInterval, {},
        "no node has an open interval covered fewer than valence times");
  return rep;
}

// ---------------------------------------------------------------------------
// Profiles

// v(x) for real x: piece_multiplicity[k] holds on the open piece to the left
// of breakpoints[k] (the last entry is the piece right of the last point);
// point_multiplicity[k] is the value at breakpoints[k].
struct ValenceProfile {
  int v_plus = 0;
  int v_minus = 0;
  std::vector<double> breakpoints;
  std::vector<int> piece_multiplicity;
  std::vector<int> point_multiplicity;

  int at(double x) const {
    const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin());
    if (it != breakpoints.end() && *it == x) return point_multiplicity[k];
    return piece_multiplicity[k];
  }
};

inline ValenceProfile profile_of_intervals(int v_plus, int v_minus, const std::vector<IntervalExt>& intervals) {
  ValenceProfile p;
  p.v_plus = v_plus;
  p.v_minus = v_minus;
  for (const IntervalExt& iv : intervals) {
    if (std::isfinite(iv.lo)) p.breakpoints.push_back(iv.lo);
    if (std::isfinite(iv.hi)) p.breakpoints.push_back(iv.hi);
  }
  std::sort(p.breakpoints.begin(), p.breakpoints.end());
  p.breakpoints.erase(std::unique(p.breakpoints.begin(), p.breakpoints.end()), p.breakpoints.end());
  const std::size_t k = p.breakpoints.size();
  for (std::size_t i = 0; i <= k; ++i) {
    const double a = i == 0 ? -INFINITY : p.breakpoints[i - 1];
    const double b = i == k ? INFINITY : p.breakpoints[i];
    int c = 0;
    for (const IntervalExt& iv : intervals)
      if (iv.lo <= a && b <= iv.hi) ++c;
    p.piece_multiplicity.push_back(c);
  }
  for (double x : p.breakpoints) {
    int c = 0;
    for (const IntervalExt& iv : intervals)
      if (iv.contains(x)) ++c;
    p.point_multiplicity.push_back(c);
  }
  return p;
}

inline ValenceProfile profile(const PlaneValenceTree& t) {
  const ValidationReport rep = validate(t);
  if (!rep.ok())
    throw Error(ErrorCode::InvalidTree, "valence_tree", std::string(to_string(rep.violations.front().kind)) + ": " +
                                                            rep.violations.front().message);
  std::vector<IntervalExt> ivs;
  for (const TreeEdge& e : t.edges) ivs.push_back(e.interval);
  return profile_of_intervals(t.total_valence(Sign::Plus), t.total_valence(Sign::Minus), ivs);
}

// x -> a x + b on every interval; a < 0 also flips every sign.
inline PlaneValenceTree transform_profile(const PlaneValenceTree& t, double a, double b) {
  if (!(a != 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::InvalidArgument, "valence_tree", "transform needs finite a != 0 and finite b");
  PlaneValenceTree out = t;
  auto map = [&](double x) { return std::isfinite(x) ? a * x + b : (a > 0 ? x : -x); };
  for (SignedNode& n : out.nodes)
    if (a < 0) n.sign = flip(n.sign);
  for (TreeEdge& e : out.edges) {
    const double lo = map(e.interval.lo), hi = map(e.interval.hi);
    e.interval = a > 0 ? IntervalExt{lo, hi} : IntervalExt{hi, lo};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism

enum class IsoMode { Shape, Full };

namespace detail {

struct Adjacency {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> nbr;  // (node, edge)
};

inline std::optional<Adjacency> adjacency_if_tree(const PlaneValenceTree& t) {
  const ValidationReport rep = validate(t);
  for (const Violation& v : rep.violations)
    if (is_structural(v.kind) || v.kind == ViolationKind::UnknownNode || v.kind == ViolationKind::EmptyTree ||
        v.kind == ViolationKind::DuplicateNode)
      return std::nullopt;
  Adjacency adj;
  adj.nbr.resize(t.nodes.size());
  for (std::size_t k = 0; k < t.edges.size(); ++k) {
    const std::size_t a = *t.index_of(t.edges[k].a), b = *t.index_of(t.edges[k].b);
    adj.nbr[a].push_back({b, k});
    adj.nbr[b].push_back({a, k});
  }
  return adj;
}

inline std::string hex_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

inline std::string rooted_code(const PlaneValenceTree& t, const Adjacency& adj, std::size_t v, std::size_t parent_edge,
                               IsoMode mode) {
  std::vector<std::string> kids;
  for (auto [w, e] : adj.nbr[v]) {
    if (e == parent_edge) continue;
    std::string k;
    if (mode == IsoMode::Full) {
      k += "[" + hex_double(t.edges[e].interval.lo) + "," + hex_double(t.edges[e].interval.hi) + "]";
    }
    k += rooted_code(t, adj, w, e, mode);
    kids.push_back(std::move(k));
  }
  std::sort(kids.begin(), kids.end());
  std::string out = "(";
  out += sign_char(t.nodes[v].sign);
  out += std::to_string(t.nodes[v].valence);
  for (const std::string& k : kids) out += k;
  out += ")";
  return out;
}

}  // namespace detail

// Smallest rooted code over all root choices; equal codes iff isomorphic.
inline std::optional<std::string> canonical_code(const PlaneValenceTree& t, IsoMode mode) {
  const auto adj = detail::adjacency_if_tree(t);
  if (!adj) return std::nullopt;
  std::optional<std::string> best;
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    std::string c = detail::rooted_code(t, *adj, v, static_cast<std::size_t>(-1), mode);
    if (!best || c < *best) best = std::move(c);
  }
  return best;
}

inline bool is_isomorphic(const PlaneValenceTree& a, const PlaneValenceTree& b, IsoMode mode = IsoMode::Shape) {
  const auto ca = canonical_code(a, mode), cb = canonical_code(b, mode);
  return ca && cb && *ca == *cb;
}

namespace detail {

inline bool close(double x, double y, double tol) {
  if (std::isinf(x) || std::isinf(y)) return x == y;
  return std::abs(x - y) <= tol;
}

inline bool match_rooted(const PlaneValenceTree& ta, const Adjacency& aa, std::size_t u, std::size_t pu,
                         const PlaneValenceTree& tb, const Adjacency& ab, std::size_t v, std::size_t pv, double tol) {
  if (ta.nodes[u].sign != tb.nodes[v].sign || ta.nodes[u].valence != tb.nodes[v].valence) return false;
  std::vector<std::pair<std::size_t, std::size_t>> cu, cv;
  for (auto p : aa.nbr[u])
    if (p.second != pu) cu.push_back(p);
  for (auto p : ab.nbr[v])
    if (p.second != pv) cv.push_back(p);
  if (cu.size() != cv.size()) return false;
  std::vector<char> used(cv.size(), 0);
  auto assign = [&](auto&& self, std::size_t i) -> bool {
    if (i == cu.size()) return true;
    const IntervalExt& ia = ta.edges[cu[i].second].interval;
    for (std::size_t j = 0; j < cv.size(); ++j) {
      if (used[j]) continue;
      const IntervalExt& ib = tb.edges[cv[j].second].interval;
      if (!close(ia.lo, ib.lo, tol) || !close(ia.hi, ib.hi, tol)) continue;
      if (!match_rooted(ta, aa, cu[i].first, cu[i].second, tb, ab, cv[j].first, cv[j].second, tol)) continue;
      used[j] = 1;
      if (self(self, i + 1)) return true;
      used[j] = 0;
    }
    return false;
  };
  return assign(assign, 0);
}

}  // namespace detail

// Full isomorphism with interval endpoints compared up to tol.
inline bool is_isomorphic_within(const PlaneValenceTree& a, const PlaneValenceTree& b, double tol) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
  const auto aa = detail::adjacency_if_tree(a), ab = detail::adjacency_if_tree(b);
  if (!aa || !ab) return false;
  const std::size_t none = static_cast<std::size_t>(-1);
  for (std::size_t v = 0; v < b.nodes.size(); ++v)
    if (detail::match_rooted(a, *aa, 0, none, b, *ab, v, none, tol)) return true;
  return false;
}

// Largest endpoint distance under the best matching found by is_isomorphic_within,
// searched by bisection on the tolerance; nullopt when the shapes differ.
inline std::optional<double> endpoint_drift(const PlaneValenceTree& a, const PlaneValenceTree& b) {
  if (!is_isomorphic(a, b, IsoMode::Shape)) return std::nullopt;
  double hi = 1.0;
  while (!is_isomorphic_within(a, b, hi)) {
    hi *= 16.0;
    if (hi > 1e12) return std::nullopt;
  }
  double lo = 0.0;
  if (is_isomorphic_within(a, b, 0.0)) return 0.0;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (is_isomorphic_within(a, b, mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Enumeration

struct PackingConstraint {
  std::string node;
  std::vector<std::size_t> edges;  // indices into the shape's edge list
  int max_overlap = 1;
  std::string description;
};

struct ShapeEntry {
  PlaneValenceTree tree;  // intervals form the feasibility certificate
  std::vector<PackingConstraint> constraints;
  bool feasible = false;
  std::string canonical;
};

namespace detail {

using EdgeList = std::vector<std::pair<int, int>>;

inline std::string unlabeled_code(int n, const EdgeList& edges) {
  PlaneValenceTree t;
  for (int k = 0; k < n; ++k) t.nodes.push_back({std::to_string(k), Sign::Plus, 1});
  for (auto [a, b] : edges) t.edges.push_back({std::to_string(a), std::to_string(b), {0.0, 1.0}});
  const auto adj = adjacency_if_tree(t);
  std::string best;
  for (int v = 0; v < n; ++v) {
    std::string c = rooted_code(t, *adj, static_cast<std::size_t>(v), static_cast<std::size_t>(-1), IsoMode::Shape);
    if (best.empty() || c < best) best = std::move(c);
  }
  return best;
}

// All unlabeled trees on n nodes, by leaf addition with canonical dedupe.
inline const std::vector<EdgeList>& unlabeled_trees(int n) {
  static std::map<int, std::vector<EdgeList>> cache;
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  std::vector<EdgeList> out;
  if (n == 1) {
    out.push_back({});
  } else {
    std::set<std::string> seen;
    for (const EdgeList& base : unlabeled_trees(n - 1)) {
      for (int v = 0; v < n - 1; ++v) {
        EdgeList e = base;
        e.push_back({v, n - 1});
        if (seen.insert(unlabeled_code(n, e)).second) out.push_back(std::move(e));
      }
    }
  }
  return cache[n] = std::move(out);
}

inline void partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> partitions_of(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  if (n == 0) return {{}};
  partitions(n, n, cur, out);
  return out;
}

inline std::string edge_name(std::size_t k) { return "I" + std::to_string(k + 1); }

inline std::vector<PackingConstraint> packing_constraints(const PlaneValenceTree& t) {
  std::vector<PackingConstraint> out;
  for (const SignedNode& node : t.nodes) {
    std::vector<std::size_t> inc;
    for (std::size_t k = 0; k < t.edges.size(); ++k)
      if (t.edges[k].a == node.id || t.edges[k].b == node.id) inc.push_back(k);
    if (static_cast<int>(inc.size()) <= node.valence) continue;
    std::string names;
    for (std::size_t k : inc) names += (names.empty() ? "" : ", ") + edge_name(k);
    std::string d;
    if (node.valence == 1) d = names + " pairwise disjoint";
    else if (static_cast<int>(inc.size()) == node.valence + 1) d = "some two of " + names + " disjoint";
    else d = "no point in more than " + std::to_string(node.valence) + " of " + names;
    out.push_back({node.id, inc, node.valence, d});
  }
  return out;
}

}  // namespace detail

// Every plane-tree shape with total valences (v_plus, v_minus), one per
// isomorphism class, sorted by node count and then canonical code.
inline std::vector<ShapeEntry> enumerate_shapes(int v_plus, int v_minus, int cap = 6) {
  if (v_plus < 0 || v_minus < 0 || v_plus + v_minus < 1)
    throw Error(ErrorCode::InvalidArgument, "valence_tree", "valences must be nonnegative with positive sum");
  if (v_plus > cap || v_minus > cap)
    throw Error(ErrorCode::CapExceeded, "valence_tree", "valences above the enumeration cap of " + std::to_string(cap));
  std::map<std::string, ShapeEntry> found;
  for (const auto& pp : detail::partitions_of(v_plus)) {
    for (const auto& pm : detail::partitions_of(v_minus)) {
      const int n = static_cast<int>(pp.size() + pm.size());
      for (const detail::EdgeList& edges : detail::unlabeled_trees(n)) {
        // Two-colour the tree from node 0.
        std::vector<int> color(static_cast<std::size_t>(n), -1);
        color[0] = 0;
        for (bool changed = true; changed;) {
          changed = false;
          for (auto [a, b] : edges) {
            if (color[static_cast<std::size_t>(a)] >= 0 && color[static_cast<std::size_t>(b)] < 0) {
              color[static_cast<std::size_t>(b)] = 1 - color[static_cast<std::size_t>(a)];
              changed = true;
            } else if (color[static_cast<std::size_t>(b)] >= 0 && color[static_cast<std::size_t>(a)] < 0) {
              color[static_cast<std::size_t>(a)] = 1 - color[static_cast<std::size_t>(b)];
              changed = true;
            }
          }
        }
        const int zeros = static_cast<int>(std::count(color.begin(), color.end(), 0));
        for (int plus_color : {0, 1}) {
          const int n_plus = plus_color == 0 ? zeros : n - zeros;
          if (n_plus != static_cast<int>(pp.size())) continue;
          std::vector<int> plus_nodes, minus_nodes;
          for (int v = 0; v < n; ++v)
            (color[static_cast<std::size_t>(v)] == plus_color ? plus_nodes : minus_nodes).push_back(v);
          std::vector<int> vp(pp.rbegin(), pp.rend()), vm(pm.rbegin(), pm.rend());
          do {
            do {
              PlaneValenceTree t;
              t.nodes.resize(static_cast<std::size_t>(n));
              for (std::size_t k = 0; k < plus_nodes.size(); ++k)
                t.nodes[static_cast<std::size_t>(plus_nodes[k])] = {"", Sign::Plus, vp[k]};
              for (std::size_t k = 0; k < minus_nodes.size(); ++k)
                t.nodes[static_cast<std::size_t>(minus_nodes[k])] = {"", Sign::Minus, vm[k]};
              for (int v = 0; v < n; ++v) t.nodes[static_cast<std::size_t>(v)].id = "n" + std::to_string(v + 1);
              for (std::size_t k = 0; k < edges.size(); ++k)
                t.edges.push_back({"n" + std::to_string(edges[k].first + 1), "n" + std::to_string(edges[k].second + 1),
                                   {2.0 * static_cast<double>(k), 2.0 * static_cast<double>(k) + 1.0}});
              std::string code = *canonical_code(t, IsoMode::Shape);
              if (!found.count(code)) {
                ShapeEntry entry;
                entry.constraints = detail::packing_constraints(t);
                entry.feasible = validate(t).ok();
                entry.canonical = code;
                entry.tree = std::move(t);
                found.emplace(std::move(code), std::move(entry));
              }
            } while (std::next_permutation(vm.begin(), vm.end()));
          } while (std::next_permutation(vp.begin(), vp.end()));
        }
      }
    }
  }
  std::vector<ShapeEntry> out;
  for (auto& [code, entry] : found) out.push_back(std::move(entry));
  std::stable_sort(out.begin(), out.end(), [](const ShapeEntry& a, const ShapeEntry& b) {
    return a.tree.nodes.size() < b.tree.nodes.size();
  });
  return out;
}

}  // namespace smirnov::tree
