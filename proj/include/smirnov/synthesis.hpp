#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "smirnov/blaschke_smirnov.hpp"
#include "smirnov/error.hpp"
#include "smirnov/region_extraction.hpp"
#include "smirnov/valence_tree.hpp"

namespace smirnov::synth {

using tree::IntervalExt;
using tree::PlaneValenceTree;
using tree::Sign;

enum class Status { Exact, Approximate, Failed };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Exact: return "exact";
    case Status::Approximate: return "approximate";
    case Status::Failed: return "failed";
  }
  return "failed";
}

struct SeedCatalogEntry {
  std::string name;
  std::string parameters;
  std::string shape;
};

inline std::vector<SeedCatalogEntry> catalog_entries() {
  return {
      {"cayley_power", "m in 1..12, sign", "single node C+:m or C-:m"},
      {"strip_affine", "a < b finite", "C+:1 -(a, b)- C-:1, affine image of i z / (1 - z^2)"},
      {"koebe_affine", "c finite", "C+:1 -(c, inf)- C-:1, shifted Koebe function"},
      {"koebe_reflected", "c finite", "C+:1 -(-inf, c)- C-:1, reflected Koebe function"},
      {"power_chain", "n >= 3, c finite", "alternating chain of n unit nodes, edges (-inf, c), (c, inf), ..."},
  };
}

struct SearchConfig {
  int restarts = 16;             // sets the per-restart share of the budget
  long budget = 100000;          // loss evaluations over all restarts
  std::uint64_t seed = 1;
  double loss_tolerance = 1e-2;  // endpoint tolerance for status exact
  double stop_loss = 1e-4;
  int resolution = 256;
  int max_degree = 4;
};

struct SynthesisProblem {
  PlaneValenceTree target;
  SearchConfig config;
};

struct SynthesisResult {
  std::optional<RationalRealSmirnov> candidate;
  double loss = std::numeric_limits<double>::infinity();
  PlaneValenceTree extracted;
  Status status = Status::Failed;
  std::string source;                // "catalog" or "search"
  std::optional<ErrorCode> error;    // e.g. NotInCatalog, BudgetExhausted
  std::string note;
  long evaluations = 0;
  std::optional<double> endpoint_error;
};

namespace detail {

inline void require_valid(const PlaneValenceTree& t) {
  const tree::ValidationReport rep = tree::validate(t);
  if (!rep.ok())
    throw Error(ErrorCode::InfeasibleTarget, "synthesis",
                std::string("target fails validation: ") + rep.violations.front().message);
}

inline extract::ExtractOptions exact_extraction() {
  extract::ExtractOptions o;
  o.trace_arcs = false;
  return o;
}

// Extracts, compares with the target at tol and fills status fields.
inline void grade(SynthesisResult& r, const PlaneValenceTree& target, double tol) {
  try {
    r.extracted = extract::extract_tree(*r.candidate, exact_extraction()).tree;
  } catch (const Error& e) {
    r.status = Status::Failed;
    r.note = e.what();
    return;
  }
  r.endpoint_error = tree::endpoint_drift(r.extracted, target);
  if (tree::is_isomorphic_within(r.extracted, target, tol)) r.status = Status::Exact;
  else if (tree::is_isomorphic(r.extracted, target, tree::IsoMode::Shape)) r.status = Status::Approximate;
  else r.status = Status::Failed;
}

inline RationalRealSmirnov strip_function() {
  return with_helson(from_rational(ComplexPolynomial({0.0, kI}), ComplexPolynomial({1.0, 0.0, -1.0})));
}

inline RationalRealSmirnov koebe_function() {
  return with_helson(from_rational(ComplexPolynomial({0.0, 1.0}), poly::pow(ComplexPolynomial({1.0, -1.0}), 2)));
}

// ((1+z)/(1-z))^n, times i when n is odd so the boundary values stay real.
inline RationalRealSmirnov power_chain_function(int n) {
  ComplexPolynomial num = poly::pow(ComplexPolynomial({1.0, 1.0}), n);
  if (n % 2 == 1) num = kI * num;
  return with_helson(from_rational(num, poly::pow(ComplexPolynomial({1.0, -1.0}), n)));
}

inline std::optional<std::vector<std::size_t>> path_order(const PlaneValenceTree& t) {
  const std::size_t n = t.nodes.size();
  if (t.edges.size() + 1 != n) return std::nullopt;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : t.edges) {
    const auto a = t.index_of(e.a), b = t.index_of(e.b);
    if (!a || !b) return std::nullopt;
    adj[*a].push_back(*b);
    adj[*b].push_back(*a);
  }
  std::size_t start = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (adj[v].size() > 2) return std::nullopt;
    if (adj[v].size() == 1 && start == n) start = v;
  }
  if (start == n) return std::nullopt;
  std::vector<std::size_t> order{start};
  std::size_t prev = n, cur = start;
  while (order.size() < n) {
    const std::size_t next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
    prev = cur;
    cur = next;
    order.push_back(cur);
  }
  return order;
}

}  // namespace detail

// Closed-form realizations of easy trees; NotInCatalog otherwise.
inline SynthesisResult catalog_realize(const PlaneValenceTree& target) {
  detail::require_valid(target);
  SynthesisResult r;
  r.source = "catalog";
  const auto reject = [] { return Error(ErrorCode::NotInCatalog, "synthesis", "no closed form for this tree"); };

  if (target.nodes.size() == 1) {
    const tree::SignedNode& n = target.nodes[0];
    if (n.valence > kDegreeCap) throw reject();
    const auto zm = FiniteBlaschkeProduct::monomial(n.valence);
    r.candidate = n.sign == Sign::Plus ? from_blaschke(FiniteBlaschkeProduct(), zm)
                                       : from_blaschke(zm, FiniteBlaschkeProduct());
    r.note = "cayley_power";
  } else if (target.nodes.size() == 2) {
    if (target.nodes[0].valence != 1 || target.nodes[1].valence != 1) throw reject();
    const IntervalExt iv = target.edges.at(0).interval;
    if (std::isfinite(iv.lo) && std::isfinite(iv.hi)) {
      r.candidate = real_affine(detail::strip_function(), iv.hi - iv.lo, 0.5 * (iv.lo + iv.hi));
      r.note = "strip_affine";
    } else if (std::isfinite(iv.lo)) {
      r.candidate = real_affine(detail::koebe_function(), 1.0, iv.lo + 0.25);
      r.note = "koebe_affine";
    } else if (std::isfinite(iv.hi)) {
      r.candidate = real_affine(detail::koebe_function(), -1.0, iv.hi - 0.25);
      r.note = "koebe_reflected";
    } else {
      throw reject();
    }
  } else {
    const auto order = detail::path_order(target);
    if (!order || target.nodes.size() > static_cast<std::size_t>(kDegreeCap)) throw reject();
    for (const auto& n : target.nodes)
      if (n.valence != 1) throw reject();
    std::optional<double> c;
    for (const auto& e : target.edges) {
      const double cut = std::isinf(e.interval.lo) ? e.interval.hi : e.interval.lo;
      if (std::isinf(e.interval.lo) == std::isinf(e.interval.hi) || (c && *c != cut)) throw reject();
      c = cut;
    }
    const int n = static_cast<int>(target.nodes.size());
    const RationalRealSmirnov base = detail::power_chain_function(n);
    for (double s : {1.0, -1.0}) {
      SynthesisResult trial = r;
      trial.candidate = real_affine(base, s, *c);
      trial.note = "power_chain";
      detail::grade(trial, target, 1e-6);
      if (trial.status == Status::Exact) return trial;
    }
    throw reject();
  }
  detail::grade(r, target, 1e-6);
  return r;
}

// ---------------------------------------------------------------------------
// Search

// Integral of |p - q| against d(arctan x) for two step profiles.
inline double profile_distance(const tree::ValenceProfile& p, const tree::ValenceProfile& q) {
  std::vector<double> cuts = p.breakpoints;
  cuts.insert(cuts.end(), q.breakpoints.begin(), q.breakpoints.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> edges{-INFINITY};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(INFINITY);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k], b = edges[k + 1];
    double x;
    if (std::isinf(a) && std::isinf(b)) x = 0.0;
    else if (std::isinf(a)) x = b - 1.0;
    else if (std::isinf(b)) x = a + 1.0;
    else x = 0.5 * (a + b);
    total += std::abs(p.at(x) - q.at(x)) * (std::atan(b) - std::atan(a));
  }
  return total;
}

// Real profile of phi by root counting between its critical values.
inline tree::ValenceProfile sampled_profile(const RationalRealSmirnov& phi, std::pair<int, int> halfplane) {
  const auto crit = extract::detail::classify_critical_points(phi);
  tree::ValenceProfile out;
  out.v_plus = halfplane.first;
  out.v_minus = halfplane.second;
  out.breakpoints = crit.candidates;
  const auto& c = crit.candidates;
  for (std::size_t k = 0; k <= c.size(); ++k) {
    double x;
    if (c.empty()) x = 0.0;
    else if (k == 0) x = c.front() - std::max(1.0, std::abs(c.front()));
    else if (k == c.size()) x = c.back() + std::max(1.0, std::abs(c.back()));
    else x = 0.5 * (c[k - 1] + c[k]);
    out.piece_multiplicity.push_back(valence_at(phi, x).count);
  }
  for (double b : c) out.point_multiplicity.push_back(valence_at(phi, b).count);
  return out;
}

// Same tree with every endpoint x replaced by arctan x, so that drifts at
// infinite endpoints stay finite.
inline PlaneValenceTree arctan_image(PlaneValenceTree t) {
  for (auto& e : t.edges) e.interval = {std::atan(e.interval.lo), std::atan(e.interval.hi)};
  return t;
}

struct LossTerms {
  double total = 0.0;
  double structural = 0.0;
  double interval = 0.0;
  double constraint = 0.0;
};

inline constexpr double kShapePenalty = 1e3;
inline constexpr double kExtractionPenalty = 1.5e3;
inline constexpr double kInfeasiblePenalty = 2e3;

// Parameter layout: (re, im) per zero of B1, then per zero of B2, then the two
// phases. Each planar pair w is squashed into the disk by tanh(|w|) w / |w|.
struct Parametrization {
  int n1 = 0;  // zeros of B1 (v_minus)
  int n2 = 0;  // zeros of B2 (v_plus)
  int size() const { return 2 * (n1 + n2) + 2; }

  static cplx squash(double x, double y) {
    const double r = std::hypot(x, y);
    if (r == 0.0) return 0.0;
    return cplx(x, y) * (std::tanh(r) / r);
  }
  std::pair<FiniteBlaschkeProduct, FiniteBlaschkeProduct> products(const std::vector<double>& p) const {
    std::vector<cplx> z1, z2;
    for (int k = 0; k < n1; ++k) z1.push_back(squash(p[2 * k], p[2 * k + 1]));
    for (int k = 0; k < n2; ++k) z2.push_back(squash(p[2 * (n1 + k)], p[2 * (n1 + k) + 1]));
    const std::size_t ph = static_cast<std::size_t>(2 * (n1 + n2));
    for (cplx& z : z1) z = std::abs(z) > 1.0 - 1e-9 ? z * (1.0 - 1e-9) / std::abs(z) : z;
    for (cplx& z : z2) z = std::abs(z) > 1.0 - 1e-9 ? z * (1.0 - 1e-9) / std::abs(z) : z;
    return {FiniteBlaschkeProduct(z1, std::polar(1.0, p[ph])), FiniteBlaschkeProduct(z2, std::polar(1.0, p[ph + 1]))};
  }
};

class SearchLoss {
 public:
  SearchLoss(const PlaneValenceTree& target, Parametrization par, int resolution)
      : target_(target),
        par_(par),
        code_(*tree::canonical_code(target, tree::IsoMode::Shape)),
        target_profile_(tree::profile(target)),
        target_arctan_(arctan_image(target)),
        resolution_(resolution) {}

  LossTerms operator()(const std::vector<double>& p) const {
    LossTerms t;
    const auto [b1, b2] = par_.products(p);
    // Outer condition: P1 Q2 - P2 Q1 must not vanish in the disk.
    const ComplexPolynomial den = b1.numerator() * b2.denominator() - b2.numerator() * b1.denominator();
    double inside = 0.0;
    int count = 0;
    if (!den.is_zero() && den.degree() > 0)
      for (const poly::Root& r : poly::find_roots(den).roots)
        if (std::abs(r.value) < 1.0 - 1e-9) {
          inside += r.multiplicity * (1.0 - std::abs(r.value));
          ++count;
        }
    if (den.is_zero() || count > 0) {
      t.constraint = kInfeasiblePenalty + 10.0 * inside;
      t.total = t.constraint;
      return t;
    }
    std::optional<RationalRealSmirnov> phi;
    try {
      phi = from_blaschke(b1, b2);
    } catch (const Error&) {
      t.constraint = kInfeasiblePenalty;
      t.total = t.constraint;
      return t;
    }
    try {
      t.interval = profile_distance(target_profile_, sampled_profile(*phi, {par_.n2, par_.n1}));
    } catch (const Error&) {
      t.structural = kExtractionPenalty;
      t.total = t.structural;
      return t;
    }
    extract::ExtractOptions o;
    o.resolution = resolution_;
    o.max_resolution = resolution_;
    o.trace_arcs = false;
    o.verify_samples = 0;
    o.valence_samples = 2;
    try {
      const auto res = extract::extract_tree(*phi, o);
      if (tree::canonical_code(res.tree, tree::IsoMode::Shape) != code_) t.structural = kShapePenalty;
      else if (const auto drift = tree::endpoint_drift(arctan_image(res.tree), target_arctan_)) t.interval += *drift;
    } catch (const Error&) {
      t.structural = kExtractionPenalty;
    }
    t.total = t.structural + t.interval;
    return t;
  }

 private:
  PlaneValenceTree target_;
  Parametrization par_;
  std::string code_;
  tree::ValenceProfile target_profile_;
  PlaneValenceTree target_arctan_;
  int resolution_;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  long evaluations = 0;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink
// 1/2). Stops on budget, on f < stop, or when the simplex collapses.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, double step, long budget, double stop) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> s(n + 1, x0);
  for (std::size_t k = 0; k < n; ++k) s[k + 1][k] += step;
  std::vector<double> fv(n + 1);
  NelderMeadResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    return f(x);
  };
  for (std::size_t k = 0; k <= n; ++k) fv[k] = eval(s[k]);
  while (out.evaluations < budget) {
    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];
    if (fv[best] < stop) break;
    double diam = 0.0;
    for (std::size_t k = 0; k <= n; ++k)
      for (std::size_t j = 0; j < n; ++j) diam = std::max(diam, std::abs(s[k][j] - s[best][j]));
    if (diam < 1e-9) break;
    std::vector<double> c(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k)
      if (k != worst)
        for (std::size_t j = 0; j < n; ++j) c[j] += s[k][j] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = c[j] + t * (s[worst][j] - c[j]);
      return x;
    };
    const auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        s[worst] = xe;
        fv[worst] = fe;
      } else {
        s[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      s[worst] = xr;
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      const auto xc = along(outside ? -0.5 : 0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, fv[worst])) {
        s[worst] = xc;
        fv[worst] = fc;
      } else {
        for (std::size_t k = 0; k <= n; ++k) {
          if (k == best) continue;
          for (std::size_t j = 0; j < n; ++j) s[k][j] = s[best][j] + 0.5 * (s[k][j] - s[best][j]);
          fv[k] = eval(s[k]);
        }
      }
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  out.f = *it;
  out.x = s[static_cast<std::size_t>(it - fv.begin())];
  return out;
}

// Simplex search over Blaschke zeros and phases with random restarts.
inline SynthesisResult synthesize_search(const SynthesisProblem& problem) {
  detail::require_valid(problem.target);
  const SearchConfig& cfg = problem.config;
  const tree::ValenceProfile tp = tree::profile(problem.target);
  SynthesisResult r;
  r.source = "search";
  if (tp.v_plus > cfg.max_degree || tp.v_minus > cfg.max_degree) {
    r.error = ErrorCode::InvalidArgument;
    r.note = "target valences exceed the search degree cap of " + std::to_string(cfg.max_degree);
    return r;
  }
  if (cfg.budget <= 0) {
    r.error = ErrorCode::BudgetExhausted;
    r.note = "zero evaluation budget";
    return r;
  }
  const Parametrization par{tp.v_minus, tp.v_plus};
  const SearchLoss loss(problem.target, par, cfg.resolution);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 0.7);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  std::vector<double> best_x;
  double best = std::numeric_limits<double>::infinity();
  const int n = par.size();
  const long per_restart = std::max<long>(2000, cfg.budget / std::max(1, cfg.restarts));
  for (int restart = 0; r.evaluations < cfg.budget && best >= cfg.stop_loss; ++restart) {
    std::vector<double> x0(static_cast<std::size_t>(n));
    // Odd restarts perturb the incumbent, even ones draw afresh.
    const bool local = !best_x.empty() && restart % 2 == 1;
    for (int tries = 0; tries < 1000; ++tries) {
      for (int k = 0; k < n; ++k) {
        const bool is_phase = k >= 2 * (par.n1 + par.n2);
        x0[static_cast<std::size_t>(k)] =
            local ? best_x[static_cast<std::size_t>(k)] + 0.1 * gauss(rng) : (is_phase ? phase(rng) : gauss(rng));
      }
      if (loss(x0).constraint == 0.0) break;
    }
    const long share = std::min(per_restart, cfg.budget - r.evaluations);
    const auto nm = nelder_mead([&](const std::vector<double>& x) { return loss(x).total; }, x0, local ? 0.05 : 0.3,
                                share, cfg.stop_loss);
    r.evaluations += nm.evaluations;
    if (nm.f < best) {
      best = nm.f;
      best_x = nm.x;
    }
  }
  r.loss = best;
  if (best >= kShapePenalty || best_x.empty()) {
    r.error = ErrorCode::BudgetExhausted;
    r.note = "no candidate with the target shape within the budget";
    if (!best_x.empty() && best < kInfeasiblePenalty) {
      const auto [b1, b2] = par.products(best_x);
      r.candidate = from_blaschke(b1, b2);
    }
    return r;
  }
  const auto [b1, b2] = par.products(best_x);
  r.candidate = from_blaschke(b1, b2);
  detail::grade(r, problem.target, cfg.loss_tolerance);
  if (r.status == Status::Exact) {
    const auto cc = extract::crosscheck(*r.candidate, r.extracted, 200, cfg.seed, cfg.loss_tolerance);
    if (!cc.ok()) r.status = Status::Approximate;
  }
  if (r.status != Status::Exact && best >= cfg.stop_loss) r.error = ErrorCode::BudgetExhausted;
  return r;
}

// Catalog first, search as the fallback.
inline SynthesisResult synthesize(const PlaneValenceTree& target, const SearchConfig& cfg = {}) {
  detail::require_valid(target);
  try {
    return catalog_realize(target);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotInCatalog) throw;
  }
  SynthesisResult r = synthesize_search({target, cfg});
  if (!r.note.empty()) r.note = "NotInCatalog; " + r.note;
  else r.note = "NotInCatalog";
  return r;
}

// ---------------------------------------------------------------------------
// Verification

struct VerifyReport {
  std::optional<std::string> construction_error;
  bool extracted = false;
  PlaneValenceTree tree;
  std::optional<extract::CrosscheckReport> crosscheck;
  double boundary_residual = 0.0;     // max relative |Im phi| on the circle
  double min_denominator_root = 0.0;  // smallest modulus of a root of D
  std::optional<double> endpoint_error;
  bool isomorphic = false;
  bool ok() const {
    return !construction_error && extracted && crosscheck && crosscheck->ok() && boundary_residual < 1e-8 &&
           min_denominator_root >= 1.0 - 1e-9;
  }
};

inline VerifyReport verify_function(const RationalRealSmirnov& phi, const PlaneValenceTree& target, double tol,
                                    int samples = 200, std::uint64_t seed = 3) {
  VerifyReport rep;
  ConstructionOptions co;
  co.boundary_samples = 10000;
  double t = 0.0;
  smirnov::detail::boundary_is_real(phi, co, &rep.boundary_residual, &t);
  rep.min_denominator_root = std::numeric_limits<double>::infinity();
  if (phi.den().degree() > 0)
    for (const poly::Root& r : poly::find_roots(phi.den()).roots)
      rep.min_denominator_root = std::min(rep.min_denominator_root, std::abs(r.value));
  try {
    rep.tree = extract::extract_tree(phi, detail::exact_extraction()).tree;
    rep.extracted = true;
  } catch (const Error& e) {
    rep.construction_error = std::string("extraction: ") + e.what();
    return rep;
  }
  rep.crosscheck = extract::crosscheck(phi, rep.tree, samples, seed, std::max(tol, 1e-3));
  rep.endpoint_error = tree::endpoint_drift(rep.tree, target);
  rep.isomorphic = tree::is_isomorphic_within(rep.tree, target, tol);
  return rep;
}

// Verification from raw Blaschke data, so that rejected constructions are
// reported rather than thrown.
inline VerifyReport verify_blaschke(const std::vector<cplx>& zeros1, cplx c1, const std::vector<cplx>& zeros2, cplx c2,
                                    const PlaneValenceTree& target, double tol) {
  try {
    const auto phi = from_blaschke(FiniteBlaschkeProduct(zeros1, c1), FiniteBlaschkeProduct(zeros2, c2));
    return verify_function(phi, target, tol);
  } catch (const Error& e) {
    VerifyReport rep;
    rep.construction_error = e.what();
    return rep;
  }
}

inline VerifyReport verify(const SynthesisResult& result, const PlaneValenceTree& target) {
  if (result.status == Status::Failed || !result.candidate)
    throw Error(ErrorCode::InvalidArgument, "synthesis", "verify needs a result that did not fail");
  const double tol = result.source == "catalog" ? 1e-6 : 1e-2;
  return verify_function(*result.candidate, target, tol);
}

}  // namespace smirnov::synth
