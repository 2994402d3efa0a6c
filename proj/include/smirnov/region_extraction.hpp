#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "smirnov/blaschke_smirnov.hpp"
#include "smirnov/error.hpp"
#include "smirnov/valence_tree.hpp"

namespace smirnov::extract {

using tree::IntervalExt;
using tree::PlaneValenceTree;
using tree::Sign;

inline constexpr double kPoleCutoff = 1e8;

// ---------------------------------------------------------------------------
// Grid partition

enum class CellClass : std::uint8_t { Plus, Minus, NearZero, Outside };

struct GridComponent {
  Sign sign = Sign::Plus;
  int cells = 0;
  cplx centroid{0.0};
};

struct GridPartition {
  int resolution = 0;
  double h = 0.0;
  std::vector<CellClass> cls;  // index j * resolution + i, x = -1 + (i + 1/2) h
  std::vector<int> label;      // component id, -1 for unlabeled cells
  std::vector<GridComponent> components;
  int fragments = 0;           // signed components below the size floor

  cplx center(int i, int j) const { return {-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h}; }
  int cell_of(cplx z) const {
    const int i = static_cast<int>(std::floor((z.real() + 1.0) / h));
    const int j = static_cast<int>(std::floor((z.imag() + 1.0) / h));
    if (i < 0 || j < 0 || i >= resolution || j >= resolution) return -1;
    return j * resolution + i;
  }
  cplx center_of(int cell) const { return center(cell % resolution, cell / resolution); }
};

inline constexpr int kMinComponentCells = 4;

// Cells whose centre lies within about one cell of the level set Im phi = 0
// (estimated as |Im phi| / |phi'|) are near_zero; the rest carry the sign of
// Im phi. Signed cells are joined by 4-connectivity.
inline GridPartition partition(const RationalRealSmirnov& phi, int resolution) {
  if (resolution < 64) throw Error(ErrorCode::InvalidArgument, "region_extraction", "resolution must be at least 64");
  GridPartition g;
  g.resolution = resolution;
  g.h = 2.0 / resolution;
  const std::size_t n = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
  g.cls.assign(n, CellClass::Outside);
  g.label.assign(n, -1);
  const double rmax = 1.0 - 1.0 / resolution;
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const cplx c = g.center(i, j);
      if (std::abs(c) >= rmax) continue;
      const auto [v, dv] = phi.value_and_derivative(c);
      CellClass k = CellClass::NearZero;
      if (std::isfinite(v.imag()) && std::isfinite(std::abs(dv))) {
        const double thr = 0.75 * g.h * std::abs(dv);
        if (v.imag() > thr) k = CellClass::Plus;
        else if (v.imag() < -thr) k = CellClass::Minus;
      }
      g.cls[static_cast<std::size_t>(j * resolution + i)] = k;
    }
  }
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  auto signed_cell = [&](int c) {
    return g.cls[static_cast<std::size_t>(c)] == CellClass::Plus || g.cls[static_cast<std::size_t>(c)] == CellClass::Minus;
  };
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const int c = j * resolution + i;
      if (!signed_cell(c)) continue;
      if (i + 1 < resolution && g.cls[static_cast<std::size_t>(c + 1)] == g.cls[static_cast<std::size_t>(c)])
        parent[static_cast<std::size_t>(find(c + 1))] = find(c);
      if (j + 1 < resolution && g.cls[static_cast<std::size_t>(c + resolution)] == g.cls[static_cast<std::size_t>(c)])
        parent[static_cast<std::size_t>(find(c + resolution))] = find(c);
    }
  }
  std::map<int, int> size;
  for (int c = 0; c < static_cast<int>(n); ++c)
    if (signed_cell(c)) ++size[find(c)];
  std::map<int, int> id_of_root;
  for (const auto& [root, count] : size) {
    if (count < kMinComponentCells) {
      ++g.fragments;
      continue;
    }
    id_of_root[root] = static_cast<int>(g.components.size());
    g.components.push_back({g.cls[static_cast<std::size_t>(root)] == CellClass::Plus ? Sign::Plus : Sign::Minus, 0, 0.0});
  }
  for (int c = 0; c < static_cast<int>(n); ++c) {
    if (!signed_cell(c)) continue;
    const auto it = id_of_root.find(find(c));
    if (it == id_of_root.end()) continue;
    g.label[static_cast<std::size_t>(c)] = it->second;
    GridComponent& comp = g.components[static_cast<std::size_t>(it->second)];
    ++comp.cells;
    comp.centroid += g.center_of(c);
  }
  for (GridComponent& comp : g.components) comp.centroid /= static_cast<double>(comp.cells);
  return g;
}

// Follows the gradient flow of s * Im phi from z until it reaches a labeled
// cell of sign s. The flow never crosses Im phi = 0, so the component found
// is the region containing z.
inline std::optional<int> locate(const RationalRealSmirnov& phi, const GridPartition& g, cplx z, Sign s) {
  const double sg = s == Sign::Plus ? 1.0 : -1.0;
  auto im = [&](cplx w) { return sg * phi.value_and_derivative(w).first.imag(); };
  double cur = im(z);
  if (!(cur > 0.0)) return std::nullopt;
  double step = 0.5 * g.h;
  const int max_steps = 16 * g.resolution;
  for (int it = 0; it < max_steps; ++it) {
    const int cell = g.cell_of(z);
    if (cell >= 0) {
      const int lab = g.label[static_cast<std::size_t>(cell)];
      if (lab >= 0 && g.components[static_cast<std::size_t>(lab)].sign == s) {
        const cplx c = g.center_of(cell);
        bool clean = true;
        for (int k = 1; k <= 4 && clean; ++k)
          if (!(im(z + (c - z) * (k / 4.0)) > 0.0)) clean = false;
        if (clean) return lab;
      }
    }
    const auto [v, dv] = phi.value_and_derivative(z);
    cplx dir = sg * kI * std::conj(dv);
    if (!(std::abs(dir) > 0.0) || !std::isfinite(std::abs(dir))) return std::nullopt;
    dir /= std::abs(dir);
    bool moved = false;
    for (double len = step; len > 1e-12; len *= 0.5) {
      const cplx w = z + len * dir;
      if (std::abs(w) >= 1.0 - 0.25 * g.h) continue;
      const double nv = im(w);
      if (nv > cur) {
        z = w;
        cur = nv;
        moved = true;
        step = std::min(0.5 * g.h, 2.0 * len);
        break;
      }
    }
    if (!moved) return std::nullopt;
    (void)v;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Regions, arcs, branch points

struct Region {
  int id = 0;  // grid component id
  Sign sign = Sign::Plus;
  int valence = 0;
  int cells = 0;
  std::vector<cplx> samples;       // interior points used to certify the valence
  std::vector<int> arcs;           // adjacent interface ids
  int interior_critical = 0;       // critical points inside, with multiplicity
};

struct BoundaryArc {
  int id = 0;
  int upper = -1;
  int lower = -1;
  IntervalExt image;                 // from level-set sampling
  std::vector<cplx> seeds;           // points on the arc, one per sampled gap
  std::vector<cplx> polyline;        // traced, oriented by increasing Re phi
  double start_value = 0.0;          // traced endpoint values
  double end_value = 0.0;
  bool traced = false;
};

struct BranchPoint {
  cplx z{0.0};
  double value = 0.0;
  int order = 2;                     // local degree of phi at z
  std::vector<int> regions;          // incident regions in angular order
};

struct Collection {
  int id = 0;
  Sign sign = Sign::Plus;
  std::vector<int> regions;
  int valence = 0;
};

struct RegionGraph {
  std::vector<Region> regions;
  std::vector<BoundaryArc> arcs;
  std::vector<BranchPoint> branch_points;
};

struct Assembly {
  std::vector<Collection> collections;
  PlaneValenceTree tree;             // node k corresponds to collections[k]
};

namespace detail {

inline const Region& region_by_id(const RegionGraph& g, int id) {
  for (const Region& r : g.regions)
    if (r.id == id) return r;
  throw Error(ErrorCode::InvalidArgument, "region_extraction", "unknown region " + std::to_string(id));
}

}  // namespace detail

// Builds collections and the valence tree from the region graph. Starting
// from the largest upper region, a collection absorbs same-sign regions
// across every unclaimed branch point it touches; each remaining component of
// the complement must meet the collection in exactly one region, which seeds
// the child collection.
inline Assembly merge_collections(const RegionGraph& g) {
  if (g.regions.empty()) throw Error(ErrorCode::InvalidArgument, "region_extraction", "no regions");
  Assembly out;
  std::vector<char> consumed(g.branch_points.size(), 0);
  std::map<int, int> pos;
  for (std::size_t k = 0; k < g.regions.size(); ++k) pos[g.regions[k].id] = static_cast<int>(k);

  auto adjacent_by_arc = [&](int a, int b) {
    for (const BoundaryArc& arc : g.arcs)
      if ((arc.upper == a && arc.lower == b) || (arc.upper == b && arc.lower == a)) return true;
    return false;
  };

  auto build = [&](auto&& self, std::set<int> component, int start) -> std::size_t {
    const Sign sign = detail::region_by_id(g, start).sign;
    std::set<int> x{start};
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t p = 0; p < g.branch_points.size(); ++p) {
        if (consumed[p]) continue;
        const auto& regs = g.branch_points[p].regions;
        const bool touches = std::any_of(regs.begin(), regs.end(), [&](int r) { return x.count(r) > 0; });
        const bool inside = std::all_of(regs.begin(), regs.end(), [&](int r) { return component.count(r) > 0; });
        if (!touches || !inside) continue;
        for (int r : regs)
          if (detail::region_by_id(g, r).sign == sign) x.insert(r);
        consumed[p] = 1;
        changed = true;
      }
    }
    const std::size_t node = out.collections.size();
    Collection col;
    col.id = static_cast<int>(node);
    col.sign = sign;
    col.regions.assign(x.begin(), x.end());
    for (int r : x) col.valence += detail::region_by_id(g, r).valence;
    out.collections.push_back(col);
    out.tree.nodes.push_back({"n" + std::to_string(node + 1), sign, col.valence});

    std::set<int> rest;
    for (int r : component)
      if (!x.count(r)) rest.insert(r);
    while (!rest.empty()) {
      std::set<int> comp{*rest.begin()};
      std::vector<int> stack{*rest.begin()};
      while (!stack.empty()) {
        const int a = stack.back();
        stack.pop_back();
        for (int b : rest)
          if (!comp.count(b) && adjacent_by_arc(a, b)) {
            comp.insert(b);
            stack.push_back(b);
          }
      }
      for (int r : comp) rest.erase(r);
      std::set<int> touching;
      std::vector<IntervalExt> pieces;
      for (const BoundaryArc& arc : g.arcs) {
        const bool up_in_x = x.count(arc.upper) > 0, lo_in_x = x.count(arc.lower) > 0;
        if (up_in_x && comp.count(arc.lower)) {
          touching.insert(arc.lower);
          pieces.push_back(arc.image);
        } else if (lo_in_x && comp.count(arc.upper)) {
          touching.insert(arc.upper);
          pieces.push_back(arc.image);
        }
      }
      if (touching.size() != 1)
        throw Error(ErrorCode::InterfaceNotUnique, "region_extraction",
                    std::to_string(touching.size()) + " regions of one complement component border the collection");
      std::sort(pieces.begin(), pieces.end(), [](const IntervalExt& a, const IntervalExt& b) { return a.lo < b.lo; });
      for (std::size_t k = 0; k + 1 < pieces.size(); ++k)
        if (pieces[k].hi != pieces[k + 1].lo)
          throw Error(ErrorCode::InterfaceNotUnique, "region_extraction", "interface arcs do not join end to end");
      const IntervalExt interval{pieces.front().lo, pieces.back().hi};
      const std::size_t child = self(self, comp, *touching.begin());
      out.tree.edges.push_back({out.tree.nodes[node].id, out.tree.nodes[child].id, interval});
    }
    return node;
  };

  int root = -1;
  for (Sign want : {Sign::Plus, Sign::Minus}) {
    for (const Region& r : g.regions)
      if (r.sign == want && (root < 0 || r.cells > g.regions[static_cast<std::size_t>(pos[root])].cells)) root = r.id;
    if (root >= 0) break;
  }
  std::set<int> all;
  for (const Region& r : g.regions) all.insert(r.id);
  build(build, all, root);
  return out;
}

// ---------------------------------------------------------------------------
// Interface tracing

struct TraceOptions {
  double stop_radius = 1.0 - 1e-5;
  int max_steps = 200000;
};

// Predictor along conj(phi') (the direction of increasing Re phi on the level
// set), corrector z -= i Im phi / phi'. Stops at the circle, at a pole
// (|phi| > 1e8) or next to a terminal: a branch point or a critical point on
// the circle, where phi' vanishes and the corrector degrades.
inline BoundaryArc trace_interface(const RationalRealSmirnov& phi, const GridPartition& g, cplx seed,
                                   const std::vector<BranchPoint>& terminals = {}, const TraceOptions& opt = {}) {
  BoundaryArc arc;
  arc.seeds.push_back(seed);
  // Horner rounding in N - phi D, relative to |D|.
  auto rounding_noise = [&](cplx w, cplx v) -> double {
    const double r = std::abs(w);
    const double d = std::abs(phi.den()(w));
    if (!(d > 0.0)) return INFINITY;
    return 64.0 * poly::kEps * (phi.num().magnitude_bound(r) + std::abs(v) * phi.den().magnitude_bound(r)) / d;
  };
  auto one_way = [&](double dir, std::vector<cplx>& pts) -> double {
    cplx z = seed;
    double step = 0.25 * g.h;
    double last_re = phi.value_and_derivative(z).first.real();
    for (int it = 0; it < opt.max_steps; ++it) {
      const auto [v, dv] = phi.value_and_derivative(z);
      if (std::abs(v) > kPoleCutoff) return v.real() > 0 ? INFINITY : -INFINITY;
      if (std::abs(z) >= opt.stop_radius) return phi.boundary_value(std::arg(z)).value;
      for (const BranchPoint& b : terminals)
        if (std::abs(z - b.z) < 2.0 * step || std::abs(z - b.z) < 1e-7) {
          pts.push_back(b.z);
          return b.value;
        }
      if (!(std::abs(dv) > 0.0))
        throw Error(ErrorCode::TraceStalled, "region_extraction", "vanishing derivative on the interface");
      const cplx tangent = dir * std::conj(dv) / std::abs(dv);
      bool accepted = false;
      while (step > 1e-12) {
        cplx w = z + step * tangent;
        if (std::abs(w) > 1.0) w *= (1.0 - 1e-12) / std::abs(w);
        for (int k = 0; k < 4; ++k) {
          const auto [wv, wd] = phi.value_and_derivative(w);
          if (!(std::abs(wd) > 0.0)) break;
          w -= kI * wv.imag() / wd;
        }
        const auto [wv, wd] = phi.value_and_derivative(w);
        const double noise = rounding_noise(w, wv);
        const bool on_curve = std::abs(wv.imag()) <= 1e-9 * std::max(1.0, std::abs(wv)) + noise;
        const bool close = std::abs(w - (z + step * tangent)) < 0.3 * step;
        const bool forward = dir * (wv.real() - last_re) > -noise || std::abs(wv) > kPoleCutoff;
        if (on_curve && close && std::isfinite(wv.real())) {
          if (!forward)
            throw Error(ErrorCode::NonMonotone, "region_extraction", "Re phi reversed along the interface");
          z = w;
          last_re = wv.real();
          pts.push_back(z);
          accepted = true;
          step = std::min(step * 1.5, 0.5 * g.h);
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        for (const BranchPoint& b : terminals)
          if (std::abs(z - b.z) < 16.0 * g.h) {
            pts.push_back(b.z);
            return b.value;
          }
        if (1.0 - std::abs(z) < 1e-3) return phi.boundary_value(std::arg(z)).value;
        throw Error(ErrorCode::TraceStalled, "region_extraction", "step size collapsed while tracing");
      }
    }
    throw Error(ErrorCode::TraceStalled, "region_extraction", "step budget exhausted while tracing");
  };
  std::vector<cplx> back, fwd;
  arc.start_value = one_way(-1.0, back);
  arc.end_value = one_way(+1.0, fwd);
  arc.polyline.assign(back.rbegin(), back.rend());
  arc.polyline.push_back(seed);
  arc.polyline.insert(arc.polyline.end(), fwd.begin(), fwd.end());
  arc.traced = true;
  return arc;
}

// Seeds the trace on the interface between two given regions: descend
// Im phi from cells of the upper region until the sign flips, bisect, and
// keep the first crossing whose far side lies in the lower region.
inline BoundaryArc trace_interface(const RationalRealSmirnov& phi, const GridPartition& g, int upper, int lower,
                                   const std::vector<BranchPoint>& terminals = {}, const TraceOptions& opt = {}) {
  for (int c = 0; c < static_cast<int>(g.label.size()); c += 1) {
    if (g.label[static_cast<std::size_t>(c)] != upper) continue;
    cplx z = g.center_of(c);
    const cplx dv = phi.value_and_derivative(z).second;
    if (!(std::abs(dv) > 0.0)) continue;
    const cplx down = -kI * std::conj(dv) / std::abs(dv);
    cplx far = z + 2.0 * g.h * down;
    if (std::abs(far) >= 1.0 || !(phi.value_and_derivative(far).first.imag() < 0.0)) continue;
    cplx a = z, b = far;
    for (int k = 0; k < 60; ++k) {
      const cplx m = 0.5 * (a + b);
      (phi.value_and_derivative(m).first.imag() > 0.0 ? a : b) = m;
    }
    const cplx nrm = -down;
    const double eps = std::min(0.125 * g.h, 1e-3);
    const auto up = locate(phi, g, a + eps * nrm, Sign::Plus);
    const auto lo = locate(phi, g, a - eps * nrm, Sign::Minus);
    if (up != upper || lo != lower) continue;
    BoundaryArc arc = trace_interface(phi, g, 0.5 * (a + b), terminals, opt);
    arc.upper = upper;
    arc.lower = lower;
    return arc;
  }
  throw Error(ErrorCode::InvalidArgument, "region_extraction", "the two regions share no interface");
}

// ---------------------------------------------------------------------------
// Valence sampling

namespace detail {

inline cplx random_lambda(std::mt19937_64& rng, Sign s) {
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.25, 3.0);
  return {re(rng), (s == Sign::Plus ? 1.0 : -1.0) * im(rng)};
}

// Roots of N - lambda D in the disk, each assigned to its region.
inline std::map<int, int> root_census(const RationalRealSmirnov& phi, const GridPartition& g, cplx lambda, Sign s,
                                      std::vector<std::pair<int, cplx>>* where = nullptr) {
  std::map<int, int> count;
  for (const poly::Root& r : poly::find_roots(phi.level_polynomial(lambda)).roots) {
    if (!(std::abs(r.value) < 1.0 - 1e-9)) continue;
    const auto lab = locate(phi, g, r.value, s);
    if (!lab)
      throw Error(ErrorCode::RootNearInterface, "region_extraction", "a sampled preimage could not be placed in a region");
    count[*lab] += r.multiplicity;
    if (where) where->push_back({*lab, r.value});
  }
  return count;
}

}  // namespace detail

// Number of preimages in the region of k random points of its half plane;
// the k counts must agree.
inline int region_valence(const RationalRealSmirnov& phi, const GridPartition& g, int region, int k,
                          std::uint64_t seed = 5) {
  if (region < 0 || region >= static_cast<int>(g.components.size()))
    throw Error(ErrorCode::InvalidArgument, "region_extraction", "unknown region");
  const Sign s = g.components[static_cast<std::size_t>(region)].sign;
  std::mt19937_64 rng(seed);
  std::optional<int> seen;
  for (int t = 0; t < k; ++t) {
    const auto census = detail::root_census(phi, g, detail::random_lambda(rng, s), s);
    const auto it = census.find(region);
    const int v = it == census.end() ? 0 : it->second;
    if (seen && *seen != v)
      throw Error(ErrorCode::InconsistentValence, "region_extraction", "region valence differs between samples");
    seen = v;
  }
  return *seen;
}

// ---------------------------------------------------------------------------
// Crosscheck

struct Mismatch {
  std::string kind;  // "plus", "minus" or "real"
  cplx lambda{0.0};
  int expected = 0;
  int observed = 0;
};

struct CrosscheckReport {
  int samples_plus = 0;
  int samples_minus = 0;
  int samples_real = 0;
  double delta = 1e-3;
  std::vector<Mismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// Compares the tree's profile with root counting at random points; real
// samples within delta (relative for |b| > 1) of a breakpoint are skipped.
inline CrosscheckReport crosscheck(const RationalRealSmirnov& phi, const PlaneValenceTree& t, int n,
                                   std::uint64_t seed = 11, double delta = 1e-3) {
  const tree::ValenceProfile p = tree::profile(t);
  CrosscheckReport rep;
  rep.delta = delta;
  std::mt19937_64 rng(seed);
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    for (int k = 0; k < n; ++k) {
      const cplx lambda = detail::random_lambda(rng, s);
      const int got = valence_at(phi, lambda).count;
      const int want = s == Sign::Plus ? p.v_plus : p.v_minus;
      (s == Sign::Plus ? rep.samples_plus : rep.samples_minus)++;
      if (got != want) rep.mismatches.push_back({s == Sign::Plus ? "plus" : "minus", lambda, want, got});
    }
  }
  double lo = -2.0, hi = 2.0;
  for (double b : p.breakpoints) {
    lo = std::min(lo, b - 1.0);
    hi = std::max(hi, b + 1.0);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int drawn = 0;
  while (drawn < n) {
    double x;
    const double r = u(rng);
    if (r < 0.7) x = lo + (hi - lo) * u(rng);
    else x = (r < 0.85 ? lo : hi) + std::tan(std::numbers::pi * (u(rng) - 0.5)) * std::max(1.0, hi - lo);
    bool near = false;
    for (double b : p.breakpoints)
      if (std::abs(x - b) < delta * std::max(1.0, std::abs(b))) near = true;
    if (near || !std::isfinite(x)) continue;
    ++drawn;
    ++rep.samples_real;
    const int got = valence_at(phi, x).count;
    const int want = p.at(x);
    if (got != want) rep.mismatches.push_back({"real", x, want, got});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Extraction

struct ExtractOptions {
  int resolution = 512;
  int max_resolution = 4096;
  int valence_samples = 3;
  int verify_samples = 64;  // per class in the final crosscheck; 0 skips it
  bool trace_arcs = true;
  std::uint64_t seed = 1;
};

struct ExtractionResult {
  PlaneValenceTree tree;
  GridPartition grid;
  RegionGraph graph;
  std::vector<Collection> collections;
  std::vector<double> breakpoint_candidates;
  int resolution = 0;
  std::vector<std::string> warnings;
};

namespace detail {

struct CriticalData {
  std::vector<double> candidates;            // finite real values where arcs may end
  std::vector<BranchPoint> branch_points;
  std::vector<BranchPoint> boundary_points;    // critical points on the circle, regions unused
  std::vector<std::pair<cplx, int>> interior;  // critical points off the level set
};

inline CriticalData classify_critical_points(const RationalRealSmirnov& phi) {
  CriticalData out;
  const ComplexPolynomial& w = phi.critical_numerator();
  if (w.is_zero() || w.degree() == 0) return out;
  for (const poly::Root& r : poly::find_roots(w).roots) {
    const double m = std::abs(r.value);
    if (std::abs(m - 1.0) < 1e-6) {
      const BoundaryValue b = phi.boundary_value(std::arg(r.value));
      if (!b.pole && std::abs(b.value) < 1e12) {
        out.candidates.push_back(b.value);
        out.boundary_points.push_back({r.value / m, b.value, r.multiplicity + 1, {}});
      }
    } else if (m < 1.0) {
      const ExtendedComplex v = phi.eval(r.value);
      if (v.infinite) continue;
      if (std::abs(v.value.imag()) <= 1e-6 * std::max(1.0, std::abs(v.value))) {
        out.branch_points.push_back({r.value, v.value.real(), r.multiplicity + 1, {}});
        out.candidates.push_back(v.value.real());
      } else {
        out.interior.push_back({r.value, r.multiplicity});
      }
    }
  }
  std::sort(out.candidates.begin(), out.candidates.end());
  std::vector<double> merged;
  for (double c : out.candidates)
    if (merged.empty() || c - merged.back() > 1e-9 * std::max(1.0, std::abs(c))) merged.push_back(c);
  out.candidates = std::move(merged);
  return out;
}

inline Sign sign_of(double x) { return x > 0 ? Sign::Plus : Sign::Minus; }

inline ExtractionResult extract_at(const RationalRealSmirnov& phi, int resolution, const ExtractOptions& opt,
                                   std::pair<int, int> halfplane) {
  ExtractionResult res;
  res.resolution = resolution;
  res.grid = partition(phi, resolution);
  const GridPartition& g = res.grid;
  if (g.fragments > 0) res.warnings.push_back(std::to_string(g.fragments) + " grid fragments left unlabeled");

  CriticalData crit = classify_critical_points(phi);
  res.breakpoint_candidates = crit.candidates;

  // Branch points: incident regions from a small circle of probes.
  for (BranchPoint& b : crit.branch_points) {
    const double rho = 0.25 * g.h;
    const int probes = 64 * b.order;
    std::vector<double> sgn(static_cast<std::size_t>(probes));
    for (int k = 0; k < probes; ++k)
      sgn[static_cast<std::size_t>(k)] =
          phi.value_and_derivative(b.z + std::polar(rho, 2.0 * std::numbers::pi * k / probes)).first.imag() - 0.0;
    int first_change = -1;
    for (int k = 0; k < probes; ++k)
      if ((sgn[static_cast<std::size_t>(k)] > 0) != (sgn[static_cast<std::size_t>((k + 1) % probes)] > 0)) {
        first_change = k;
        break;
      }
    if (first_change < 0)
      throw Error(ErrorCode::ResolutionTooCoarse, "region_extraction", "branch point probes found no sectors");
    int k = first_change + 1;
    for (int run = 0; run < 2 * b.order; ++run) {
      const int start = k;
      const bool pos = sgn[static_cast<std::size_t>(k % probes)] > 0;
      int len = 0;
      while (len < probes && (sgn[static_cast<std::size_t>((k) % probes)] > 0) == pos) {
        ++k;
        ++len;
      }
      const double mid = 2.0 * std::numbers::pi * (start + 0.5 * (len - 1)) / probes;
      const auto lab = locate(phi, g, b.z + std::polar(rho, mid), pos ? Sign::Plus : Sign::Minus);
      if (!lab) throw Error(ErrorCode::ResolutionTooCoarse, "region_extraction", "branch sector not located");
      b.regions.push_back(*lab);
    }
    if ((k - first_change - 1) != probes)
      throw Error(ErrorCode::ResolutionTooCoarse, "region_extraction", "branch point sector count mismatch");
  }

  // Arcs from level sets of gap samples.
  const auto& cand = crit.candidates;
  const std::size_t gaps = cand.size() + 1;
  std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, cplx>>> seen;
  for (std::size_t k = 0; k < gaps; ++k) {
    double x;
    if (cand.empty()) x = 0.0;
    else if (k == 0) x = cand.front() - std::max(1.0, std::abs(cand.front()));
    else if (k == cand.size()) x = cand.back() + std::max(1.0, std::abs(cand.back()));
    else x = 0.5 * (cand[k - 1] + cand[k]);
    const auto roots = poly::find_roots(phi.level_polynomial(x)).roots;
    for (const poly::Root& r : roots) {
      if (!(std::abs(r.value) < 1.0 - 1e-9)) continue;
      if (r.multiplicity != 1)
        throw Error(ErrorCode::ResolutionTooCoarse, "region_extraction", "gap sample hit a critical value");
      const cplx dv = phi.value_and_derivative(r.value).second;
      const cplx nrm = kI * std::conj(dv) / std::abs(dv);
      std::optional<int> up, lo;
      for (double eps = std::min(0.125 * g.h, 1e-3); eps > 1e-9 && (!up || !lo); eps *= 0.25) {
        up = locate(phi, g, r.value + eps * nrm, Sign::Plus);
        lo = locate(phi, g, r.value - eps * nrm, Sign::Minus);
      }
      if (!up || !lo)
        throw Error(ErrorCode::ResolutionTooCoarse, "region_extraction", "regions flanking an interface not located");
      seen[{*up, *lo}].push_back({k, r.value});
    }
  }
  auto gap_lo = [&](std::size_t k) { return k == 0 ? -INFINITY : cand[k - 1]; };
  auto gap_hi = [&](std::size_t k) { return k == cand.size() ? INFINITY : cand[k]; };
  for (auto& [key, hits] : seen) {
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k + 1 < hits.size(); ++k)
      if (hits[k + 1].first != hits[k].first + 1)
        throw Error(ErrorCode::InterfaceNotUnique, "region_extraction",
                    "one pair of regions meets along more than one interface");
    BoundaryArc arc;
    arc.id = static_cast<int>(res.graph.arcs.size());
    arc.upper = key.first;
    arc.lower = key.second;
    arc.image = {gap_lo(hits.front().first), gap_hi(hits.back().first)};
    for (const auto& h : hits) arc.seeds.push_back(h.second);
    res.graph.arcs.push_back(arc);
  }

  // Region valences by root census, checked against Riemann-Hurwitz.
  std::mt19937_64 rng(opt.seed);
  std::map<int, int> valence;
  std::map<int, std::vector<cplx>> samples;
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    std::optional<std::map<int, int>> first;
    for (int t = 0; t < opt.valence_samples; ++t) {
      std::vector<std::pair<int, cplx>> where;
      const auto census = root_census(phi, g, random_lambda(rng, s), s, &where);
      if (first && census != *first)
        throw Error(ErrorCode::InconsistentValence, "region_extraction", "region valences differ between samples");
      first = census;
      for (const auto& [lab, z] : where) samples[lab].push_back(z);
    }
    if (first)
      for (const auto& [lab, v] : *first) valence[lab] = v;
  }
  std::map<int, int> critical_in;
  for (const auto& [z, mult] : crit.interior) {
    const auto v = phi.eval(z).value;
    std::optional<int> lab;
    for (int k = 0; k < 8 && !lab; ++k) lab = locate(phi, g, z + std::polar(1e-3 * g.h, 0.7 * k), sign_of(v.imag()));
    if (!lab) throw Error(ErrorCode::ResolutionTooCoarse, "region_extraction", "interior critical point not located");
    critical_in[*lab] += mult;
  }

  std::set<int> ids;
  for (const auto& [lab, v] : valence) ids.insert(lab);
  for (const BoundaryArc& a : res.graph.arcs) {
    ids.insert(a.upper);
    ids.insert(a.lower);
  }
  for (const BranchPoint& b : crit.branch_points) ids.insert(b.regions.begin(), b.regions.end());
  for (const auto& [lab, m] : critical_in) ids.insert(lab);
  int total_plus = 0, total_minus = 0;
  for (int id : ids) {
    Region r;
    r.id = id;
    r.sign = g.components[static_cast<std::size_t>(id)].sign;
    r.cells = g.components[static_cast<std::size_t>(id)].cells;
    r.valence = valence.count(id) ? valence[id] : 0;
    r.interior_critical = critical_in.count(id) ? critical_in[id] : 0;
    r.samples = samples[id];
    if (r.valence < 1)
      throw Error(ErrorCode::InconsistentValence, "region_extraction", "a region received no preimages");
    if (r.valence != 1 + r.interior_critical)
      throw Error(ErrorCode::InconsistentValence, "region_extraction",
                  "region valence " + std::to_string(r.valence) + " disagrees with " +
                      std::to_string(r.interior_critical) + " interior critical points");
    for (const BoundaryArc& a : res.graph.arcs)
      if (a.upper == id || a.lower == id) r.arcs.push_back(a.id);
    (r.sign == Sign::Plus ? total_plus : total_minus) += r.valence;
    res.graph.regions.push_back(r);
  }
  if (total_plus != halfplane.first || total_minus != halfplane.second)
    throw Error(ErrorCode::ExtractionMismatch, "region_extraction", "region valences do not sum to the half-plane valences");
  const int orphans = static_cast<int>(g.components.size()) - static_cast<int>(ids.size());
  if (orphans > 0) res.warnings.push_back(std::to_string(orphans) + " grid components matched no region");

  res.graph.branch_points = crit.branch_points;
  Assembly asmb = merge_collections(res.graph);
  res.collections = std::move(asmb.collections);
  res.tree = std::move(asmb.tree);
  const tree::ValidationReport vr = tree::validate(res.tree);
  if (!vr.ok())
    throw Error(ErrorCode::ExtractionMismatch, "region_extraction",
                std::string("extracted tree is invalid: ") + tree::to_string(vr.violations.front().kind));

  if (opt.trace_arcs) {
    std::vector<BranchPoint> terminals = res.graph.branch_points;
    terminals.insert(terminals.end(), crit.boundary_points.begin(), crit.boundary_points.end());
    for (BoundaryArc& a : res.graph.arcs) {
      const std::size_t mid = a.seeds.size() / 2;
      BoundaryArc traced = trace_interface(phi, g, a.seeds[mid], terminals);
      a.polyline = std::move(traced.polyline);
      a.start_value = traced.start_value;
      a.end_value = traced.end_value;
      a.traced = true;
      auto far = [](double got, double want) {
        if (std::isinf(want) || std::isinf(got)) return got != want;
        return std::abs(got - want) > 1e-3 * std::max(1.0, std::abs(want));
      };
      if (far(a.start_value, a.image.lo) || far(a.end_value, a.image.hi))
        res.warnings.push_back("traced endpoints of arc " + std::to_string(a.id) + " differ from its sampled interval");
    }
  }
  if (opt.verify_samples > 0) {
    const CrosscheckReport cc = crosscheck(phi, res.tree, opt.verify_samples, opt.seed + 1, 1e-6);
    if (!cc.ok())
      throw Error(ErrorCode::ExtractionMismatch, "region_extraction",
                  std::to_string(cc.mismatches.size()) + " crosscheck mismatches");
  }
  return res;
}

}  // namespace detail

// Plane valence tree of phi, doubling the grid resolution on failure.
inline ExtractionResult extract_tree(const RationalRealSmirnov& phi, const ExtractOptions& opt = {}) {
  const auto halfplane = halfplane_valences(phi);
  std::optional<Error> last;
  for (int res = opt.resolution; res <= opt.max_resolution; res *= 2) {
    try {
      return detail::extract_at(phi, res, opt, halfplane);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::ResolutionTooCoarse:
        case ErrorCode::RootNearInterface:
        case ErrorCode::InconsistentValence:
        case ErrorCode::InterfaceNotUnique:
        case ErrorCode::TraceStalled:
        case ErrorCode::NonMonotone:
        case ErrorCode::ExtractionMismatch:
          last = e;
          break;
        default:
          throw;
      }
    }
  }
  throw Error(ErrorCode::ExtractionMismatch, "region_extraction",
              std::string("no consistent tree up to the maximum resolution; last failure: ") + last->what());
}

}  // namespace smirnov::extract
