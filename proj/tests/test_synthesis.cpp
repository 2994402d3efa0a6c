#include <gtest/gtest.h>

#include "smirnov/synthesis.hpp"
#include "support/random_functions.hpp"

using namespace smirnov;
using namespace smirnov::synth;
using tree::PlaneValenceTree;
using tree::Sign;

namespace {

PlaneValenceTree single_node(Sign s, int m) {
  PlaneValenceTree t;
  t.nodes = {{"n", s, m}};
  return t;
}

PlaneValenceTree single_edge(double lo, double hi) {
  PlaneValenceTree t;
  t.nodes = {{"u", Sign::Plus, 1}, {"l", Sign::Minus, 1}};
  t.edges = {{"u", "l", {lo, hi}}};
  return t;
}

PlaneValenceTree chain(int n, double c, bool first_left) {
  PlaneValenceTree t;
  for (int k = 0; k < n; ++k)
    t.nodes.push_back({"c" + std::to_string(k), k % 2 == 0 ? Sign::Plus : Sign::Minus, 1});
  for (int k = 0; k + 1 < n; ++k) {
    const bool left = (k % 2 == 0) == first_left;
    t.edges.push_back({"c" + std::to_string(k), "c" + std::to_string(k + 1),
                       left ? tree::IntervalExt{-INFINITY, c} : tree::IntervalExt{c, INFINITY}});
  }
  return t;
}

PlaneValenceTree tree_two(double lo, double hi) {
  PlaneValenceTree t;
  t.nodes = {{"p", Sign::Plus, 2}, {"m", Sign::Minus, 1}};
  t.edges = {{"p", "m", {lo, hi}}};
  return t;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Catalog, SingleNodes) {
  for (Sign s : {Sign::Plus, Sign::Minus})
    for (int m = 1; m <= 3; ++m) {
      const auto r = catalog_realize(single_node(s, m));
      EXPECT_EQ(r.status, Status::Exact);
      EXPECT_TRUE(tree::is_isomorphic_within(r.extracted, single_node(s, m), 1e-6));
    }
  const auto r = catalog_realize(single_node(Sign::Plus, 1));
  EXPECT_LT(std::abs(r.candidate->eval(0.0).value - kI), 1e-15);
}

TEST(Catalog, SingleEdges) {
  for (auto [lo, hi] : {std::pair{-1.0, 1.0}, std::pair<double, double>{0.0, INFINITY}, std::pair<double, double>{-INFINITY, 0.0},
                        std::pair{-0.5, 0.5}, std::pair{0.0, 1.0}, std::pair<double, double>{3.0, INFINITY}}) {
    const auto r = catalog_realize(single_edge(lo, hi));
    EXPECT_EQ(r.status, Status::Exact) << lo << " " << hi;
  }
  // (-1/2, 1/2) is the strip function itself.
  const auto r = catalog_realize(single_edge(-0.5, 0.5));
  const cplx z(0.3, 0.2);
  EXPECT_LT(std::abs(r.candidate->eval(z).value - kI * z / (1.0 - z * z)), 1e-12);
  // (0, inf) is the Koebe function shifted by 1/4.
  const auto k = catalog_realize(single_edge(0.0, INFINITY));
  EXPECT_LT(std::abs(k.candidate->eval(z).value - (z / ((1.0 - z) * (1.0 - z)) + 0.25)), 1e-12);
}

TEST(Catalog, PowerChains) {
  for (int n : {3, 4, 5})
    for (bool left : {true, false})
      for (double c : {0.0, 1.5}) {
        const auto r = catalog_realize(chain(n, c, left));
        EXPECT_EQ(r.status, Status::Exact) << n << " " << left << " " << c;
      }
}

TEST(Catalog, RejectsOtherTrees) {
  EXPECT_EQ(code_of([] { catalog_realize(tree_two(-1.0, 1.0)); }), ErrorCode::NotInCatalog);
  PlaneValenceTree bad = single_edge(-INFINITY, INFINITY);
  EXPECT_EQ(code_of([&] { catalog_realize(bad); }), ErrorCode::InfeasibleTarget);
}

// Property: reflecting the tree equals reflecting the realized function.
TEST(Catalog, ReflectionCommutes) {
  for (const auto& t : {single_node(Sign::Plus, 2), single_edge(-1.0, 2.0), single_edge(0.5, INFINITY), chain(4, 0.0, true)}) {
    const auto mirrored = catalog_realize(tree::transform_profile(t, -1.0, 0.0));
    const auto direct = real_affine(*catalog_realize(t).candidate, -1.0, 0.0);
    const auto a = extract::extract_tree(*mirrored.candidate).tree;
    const auto b = extract::extract_tree(direct).tree;
    EXPECT_TRUE(tree::is_isomorphic_within(a, b, 1e-6));
  }
}

// Oracle: arctan-measure distance computed by hand.
TEST(Search, ProfileDistance) {
  const auto p = tree::profile(single_edge(-1.0, 1.0));
  const auto q = tree::profile(single_edge(0.0, 1.0));
  EXPECT_NEAR(profile_distance(p, q), std::atan(1.0), 1e-15);
  const auto k = tree::profile(single_edge(0.0, INFINITY));
  EXPECT_NEAR(profile_distance(k, q), std::numbers::pi / 2 - std::atan(1.0), 1e-15);
  EXPECT_EQ(profile_distance(p, p), 0.0);
}

TEST(Search, SampledProfileMatchesExtraction) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const auto f = testing_support::random_helson_up_to(rng, 3);
    const auto t = extract::extract_tree(f).tree;
    EXPECT_LT(profile_distance(tree::profile(t), sampled_profile(f, halfplane_valences(f))), 1e-12);
  }
}

TEST(Search, LossIgnoresNodeIds) {
  const PlaneValenceTree a = tree_two(-1.0, 1.0);
  PlaneValenceTree b = a;
  b.nodes[0].id = "zz";
  b.nodes[1].id = "aa";
  b.edges[0] = {"zz", "aa", {-1.0, 1.0}};
  const Parametrization par{1, 2};
  const SearchLoss la(a, par, 256), lb(b, par, 256);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.7);
  for (int k = 0; k < 5; ++k) {
    std::vector<double> x(static_cast<std::size_t>(par.size()));
    for (double& v : x) v = g(rng);
    EXPECT_EQ(la(x).total, lb(x).total);
  }
}

TEST(Search, TreeTwoOnUnitInterval) {
  SearchConfig cfg;
  cfg.seed = 1;
  const auto r = synthesize(tree_two(-1.0, 1.0), cfg);
  EXPECT_EQ(r.source, "search");
  EXPECT_EQ(r.status, Status::Exact);
  EXPECT_LT(r.loss, 1e-2);
  EXPECT_LE(r.evaluations, 100000);
  ASSERT_TRUE(r.endpoint_error.has_value());
  EXPECT_LT(*r.endpoint_error, 1e-2);
  const auto rep = verify(r, tree_two(-1.0, 1.0));
  EXPECT_TRUE(rep.ok());
}

TEST(Search, SingleNodeFromSearchAlone) {
  SynthesisProblem p{single_node(Sign::Plus, 1), {}};
  const auto r = synthesize_search(p);
  EXPECT_EQ(r.status, Status::Exact);
  EXPECT_LT(r.loss, 1e-6);
}

TEST(Search, InfeasibleTargetIsNeverSearched) {
  // (v+, v-) = (1, 2) but three intervals meet at the C+ node.
  PlaneValenceTree t;
  t.nodes = {{"p", Sign::Plus, 1}, {"m", Sign::Minus, 2}};
  t.edges = {{"p", "m", {-INFINITY, 0.0}}, {"p", "m", {-INFINITY, 0.0}}, {"p", "m", {-INFINITY, 0.0}}};
  EXPECT_EQ(code_of([&] { synthesize(t); }), ErrorCode::InfeasibleTarget);
  PlaneValenceTree packed;
  packed.nodes = {{"p", Sign::Plus, 1}, {"a", Sign::Minus, 1}, {"b", Sign::Minus, 1}};
  packed.edges = {{"p", "a", {0.0, 2.0}}, {"p", "b", {1.0, 3.0}}};
  EXPECT_EQ(code_of([&] { synthesize_search({packed, {}}); }), ErrorCode::InfeasibleTarget);
}

TEST(Search, ZeroBudgetFails) {
  PlaneValenceTree t;
  t.nodes = {{"a", Sign::Plus, 1}, {"b", Sign::Minus, 1}, {"c", Sign::Plus, 1}};
  t.edges = {{"a", "b", {-2.0, -1.0}}, {"b", "c", {1.0, 3.0}}};
  SearchConfig cfg;
  cfg.budget = 0;
  const auto r = synthesize(t, cfg);
  EXPECT_EQ(r.status, Status::Failed);
  EXPECT_NE(r.note.find("NotInCatalog"), std::string::npos);
  EXPECT_FALSE(r.candidate.has_value());
}

TEST(Verify, CatalogStripHasNoMismatches) {
  const auto r = catalog_realize(single_edge(-0.5, 0.5));
  const auto rep = verify(r, single_edge(-0.5, 0.5));
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(rep.isomorphic);
  EXPECT_EQ(rep.crosscheck->mismatches.size(), 0u);
}

TEST(Verify, ZeroOutsideDiskIsRejectedAtConstruction) {
  const auto rep = verify_blaschke({cplx(0.2, 0.1)}, 1.0, {cplx(1.3, 0.0), cplx(-0.4, 0.0)}, 1.0, tree_two(-1, 1), 1e-2);
  ASSERT_TRUE(rep.construction_error.has_value());
  EXPECT_FALSE(rep.ok());
}
