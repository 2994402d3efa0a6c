#include <gtest/gtest.h>

#include "smirnov/region_extraction.hpp"
#include "support/random_functions.hpp"

using namespace smirnov;
using namespace smirnov::extract;
using tree::IntervalExt;
using tree::Sign;

namespace {

const ComplexPolynomial kOnePlusZ({1.0, 1.0});
const ComplexPolynomial kOneMinusZ({1.0, -1.0});

RationalRealSmirnov phi1() { return from_blaschke(FiniteBlaschkeProduct(), FiniteBlaschkeProduct::monomial(1)); }
RationalRealSmirnov phi3() { return from_rational(poly::pow(kOnePlusZ, 4), poly::pow(kOneMinusZ, 4)); }
RationalRealSmirnov koebe() { return from_rational(ComplexPolynomial({0.0, 1.0}), poly::pow(kOneMinusZ, 2)); }
RationalRealSmirnov phi5() { return from_rational(ComplexPolynomial({0.0, kI}), ComplexPolynomial({1.0, 0.0, -1.0})); }
RationalRealSmirnov koebe_sq() { return precompose_inner(koebe(), FiniteBlaschkeProduct::monomial(2)); }

ExtractOptions fast() {
  ExtractOptions o;
  o.resolution = 256;
  return o;
}

int count_sign(const GridPartition& g, Sign s) {
  int n = 0;
  for (const auto& c : g.components) n += c.sign == s;
  return n;
}

std::multiset<std::pair<double, double>> intervals_of(const tree::PlaneValenceTree& t) {
  std::multiset<std::pair<double, double>> out;
  for (const auto& e : t.edges) out.insert({e.interval.lo, e.interval.hi});
  return out;
}

}  // namespace

TEST(Partition, ComponentCountsForFixtures) {
  const auto g1 = partition(phi1(), 128);
  EXPECT_EQ(count_sign(g1, Sign::Plus), 1);
  EXPECT_EQ(count_sign(g1, Sign::Minus), 0);
  const auto g5 = partition(phi5(), 128);
  EXPECT_EQ(count_sign(g5, Sign::Plus), 1);
  EXPECT_EQ(count_sign(g5, Sign::Minus), 1);
  const auto g3 = partition(phi3(), 256);
  EXPECT_EQ(count_sign(g3, Sign::Plus), 2);
  EXPECT_EQ(count_sign(g3, Sign::Minus), 2);
}

// Oracle: the sign of Im phi at a cell centre, evaluated directly, agrees
// with every labeled cell.
TEST(Partition, LabelsCarryTheSignOfImPhi) {
  const auto f = phi3();
  const auto g = partition(f, 128);
  for (int c = 0; c < static_cast<int>(g.cls.size()); ++c) {
    const int lab = g.label[static_cast<std::size_t>(c)];
    if (lab < 0) continue;
    const double im = f.eval(g.center_of(c)).value.imag();
    EXPECT_EQ(g.components[static_cast<std::size_t>(lab)].sign, im > 0 ? Sign::Plus : Sign::Minus);
  }
}

TEST(RegionValence, FixturesHaveUnitRegions) {
  const auto g1 = partition(phi1(), 128);
  EXPECT_EQ(region_valence(phi1(), g1, 0, 4), 1);
  const auto g3 = partition(phi3(), 256);
  for (int r = 0; r < static_cast<int>(g3.components.size()); ++r) EXPECT_EQ(region_valence(phi3(), g3, r, 4), 1);
  const auto g5 = partition(phi5(), 128);
  for (int r = 0; r < static_cast<int>(g5.components.size()); ++r) EXPECT_EQ(region_valence(phi5(), g5, r, 4), 1);
}

TEST(TraceInterface, EndpointsOfKoebeAndPhi5) {
  const auto k = koebe();
  const auto gk = partition(k, 256);
  const auto arc = trace_interface(k, gk, cplx(0.2, 0.0));
  EXPECT_NEAR(arc.start_value, -0.25, 1e-3);
  EXPECT_EQ(arc.end_value, INFINITY);
  const auto f = phi5();
  const auto g5 = partition(f, 256);
  const auto a5 = trace_interface(f, g5, cplx(0.0, 0.1));
  EXPECT_NEAR(a5.start_value, -0.5, 1e-3);
  EXPECT_NEAR(a5.end_value, 0.5, 1e-3);
  // Re phi increases along the polyline and Im phi stays on the level set.
  for (std::size_t i = 0; i + 1 < a5.polyline.size(); ++i) {
    EXPECT_LT(f.eval(a5.polyline[i]).value.real(), f.eval(a5.polyline[i + 1]).value.real());
    EXPECT_LT(std::abs(f.eval(a5.polyline[i]).value.imag()), 1e-8);
  }
}

TEST(TraceInterface, ByRegionPair) {
  const auto f = phi3();
  const auto g = partition(f, 256);
  const auto res = extract_tree(f, fast());
  for (const auto& a : res.graph.arcs) {
    const auto t = trace_interface(f, g, a.upper, a.lower);
    for (auto [got, want] : {std::pair{t.start_value, a.image.lo}, std::pair{t.end_value, a.image.hi}}) {
      if (std::isinf(want)) EXPECT_EQ(got, want);
      else EXPECT_NEAR(got, want, 1e-3);
    }
  }
}

TEST(ExtractTree, Phi1SingleNode) {
  const auto res = extract_tree(phi1(), fast());
  ASSERT_EQ(res.tree.nodes.size(), 1u);
  EXPECT_EQ(res.tree.nodes[0].sign, Sign::Plus);
  EXPECT_EQ(res.tree.nodes[0].valence, 1);
  EXPECT_TRUE(res.tree.edges.empty());
  EXPECT_EQ(res.collections.size(), 1u);
}

TEST(ExtractTree, KoebeSingleEdge) {
  const auto res = extract_tree(koebe(), fast());
  ASSERT_EQ(res.tree.nodes.size(), 2u);
  ASSERT_EQ(res.tree.edges.size(), 1u);
  EXPECT_NEAR(res.tree.edges[0].interval.lo, -0.25, 1e-9);
  EXPECT_EQ(res.tree.edges[0].interval.hi, INFINITY);
  ASSERT_EQ(res.graph.arcs.size(), 1u);
  EXPECT_NEAR(res.graph.arcs[0].start_value, -0.25, 1e-3);
  EXPECT_EQ(res.graph.arcs[0].end_value, INFINITY);
}

TEST(ExtractTree, Phi5SingleEdge) {
  const auto res = extract_tree(phi5(), fast());
  ASSERT_EQ(res.tree.edges.size(), 1u);
  EXPECT_NEAR(res.tree.edges[0].interval.lo, -0.5, 1e-9);
  EXPECT_NEAR(res.tree.edges[0].interval.hi, 0.5, 1e-9);
  EXPECT_TRUE(crosscheck(phi5(), res.tree, 200, 3).ok());
}

TEST(ExtractTree, Phi3FourNodeChain) {
  const auto res = extract_tree(phi3(), fast());
  EXPECT_TRUE(res.graph.branch_points.empty());
  EXPECT_EQ(res.collections.size(), 4u);
  tree::PlaneValenceTree want;
  want.nodes = {{"a", Sign::Plus, 1}, {"b", Sign::Minus, 1}, {"c", Sign::Plus, 1}, {"d", Sign::Minus, 1}};
  want.edges = {{"a", "b", {-INFINITY, 0.0}}, {"b", "c", {0.0, INFINITY}}, {"c", "d", {-INFINITY, 0.0}}};
  EXPECT_TRUE(tree::is_isomorphic_within(res.tree, want, 1e-9));
  EXPECT_TRUE(crosscheck(phi3(), res.tree, 200, 4).ok());
}

// Derived by hand: Koebe(z^2) maps quadrants I and III up and II and IV down,
// with a simple branch point at 0 of value 0.
TEST(ExtractTree, KoebeSquaredMergesAtBranchPoint) {
  const auto res = extract_tree(koebe_sq(), fast());
  ASSERT_EQ(res.graph.branch_points.size(), 1u);
  EXPECT_LT(std::abs(res.graph.branch_points[0].z), 1e-8);
  EXPECT_EQ(res.graph.branch_points[0].regions.size(), 4u);
  EXPECT_EQ(res.graph.regions.size(), 4u);
  tree::PlaneValenceTree want;
  want.nodes = {{"u", Sign::Plus, 2}, {"l1", Sign::Minus, 1}, {"l2", Sign::Minus, 1}};
  want.edges = {{"u", "l1", {-0.25, INFINITY}}, {"u", "l2", {-0.25, INFINITY}}};
  EXPECT_TRUE(tree::is_isomorphic_within(res.tree, want, 1e-9));
}

TEST(Crosscheck, DetectsCorruptedInterval) {
  tree::PlaneValenceTree bad;
  bad.nodes = {{"u", Sign::Plus, 1}, {"l", Sign::Minus, 1}};
  bad.edges = {{"u", "l", {0.0, INFINITY}}};
  const auto rep = crosscheck(koebe(), bad, 200, 9);
  ASSERT_FALSE(rep.ok());
  for (const auto& m : rep.mismatches) {
    EXPECT_EQ(m.kind, "real");
    EXPECT_GT(m.lambda.real(), -0.25);
    EXPECT_LT(m.lambda.real(), 0.0);
  }
}

// Combinatorial configuration: four upper regions A-D joined through two
// branch points, with the lower regions around them.
TEST(MergeCollections, FourUpperRegionsFormOneNode) {
  enum { A, B, C, D, E, F, G, H, I, J, K };
  RegionGraph g;
  const Sign up = Sign::Plus, lo = Sign::Minus;
  const Sign signs[] = {up, up, up, up, lo, lo, lo, lo, lo, up, lo};
  for (int r = A; r <= K; ++r) {
    Region reg;
    reg.id = r;
    reg.sign = signs[r];
    reg.valence = 1;
    reg.cells = r == A ? 1000 : 100;
    g.regions.push_back(reg);
  }
  g.branch_points.push_back({cplx(0.1, 0.0), 0.0, 2, {E, A, H, B}});
  g.branch_points.push_back({cplx(0.2, 0.0), 1.0, 3, {B, F, C, G, D, H}});
  auto arc = [&](int u, int l, double a, double b) {
    BoundaryArc x;
    x.id = static_cast<int>(g.arcs.size());
    x.upper = u;
    x.lower = l;
    x.image = {a, b};
    g.arcs.push_back(x);
  };
  arc(A, H, -2, 0);
  arc(B, H, 0, 1);
  arc(D, H, 1, 3);
  arc(A, E, -1, 0);
  arc(B, E, 0, 2);
  arc(B, F, 0.5, 1);
  arc(C, F, 1, 1.5);
  arc(C, G, 0.8, 1);
  arc(D, G, 1, 4);
  arc(A, I, -5, -4);
  arc(J, F, 5, 6);
  arc(J, K, 7, 8);
  const Assembly out = merge_collections(g);
  ASSERT_EQ(out.collections.size(), 8u);
  EXPECT_EQ(out.collections[0].regions, (std::vector<int>{A, B, C, D}));
  EXPECT_EQ(out.collections[0].valence, 4);
  EXPECT_EQ(intervals_of(out.tree), (std::multiset<std::pair<double, double>>{
                                        {-2, 3}, {-1, 2}, {0.5, 1.5}, {0.8, 4}, {-5, -4}, {5, 6}, {7, 8}}));
  for (const auto& c : out.collections)
    if (c.id != 0) {
      EXPECT_EQ(c.regions.size(), 1u);
    }
  EXPECT_TRUE(tree::validate(out.tree).ok());
}

TEST(MergeCollections, TwoRegionsOfOneComponentTouchingIsAnError) {
  RegionGraph g;
  for (int r = 0; r < 3; ++r) g.regions.push_back({r, r == 0 ? Sign::Plus : Sign::Minus, 1, 10 - r, {}, {}, 0});
  g.regions.push_back({3, Sign::Plus, 1, 1, {}, {}, 0});
  g.arcs.push_back({0, 0, 1, {0.0, 1.0}, {}, {}, 0, 0, false});
  g.arcs.push_back({1, 0, 2, {2.0, 3.0}, {}, {}, 0, 0, false});
  g.arcs.push_back({2, 3, 1, {4.0, 5.0}, {}, {}, 0, 0, false});
  g.arcs.push_back({3, 3, 2, {6.0, 7.0}, {}, {}, 0, 0, false});
  try {
    merge_collections(g);
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InterfaceNotUnique);
  }
}

TEST(ExtractTree, ResolutionStability) {
  for (const auto& f : {phi3(), koebe(), phi5(), koebe_sq()}) {
    ExtractOptions a = fast(), b = fast();
    b.resolution = 512;
    const auto ta = extract_tree(f, a).tree;
    const auto tb = extract_tree(f, b).tree;
    EXPECT_TRUE(tree::is_isomorphic_within(ta, tb, 1e-3));
  }
}

TEST(ExtractTree, AffineEquivariance) {
  const auto f = phi5();
  const auto t = extract_tree(f, fast()).tree;
  for (auto [a, b] : {std::pair{2.0, 0.0}, std::pair{-1.5, 0.25}, std::pair{0.5, -3.0}}) {
    const auto g = extract_tree(real_affine(f, a, b), fast()).tree;
    EXPECT_TRUE(tree::is_isomorphic_within(g, tree::transform_profile(t, a, b), 1e-3)) << a << " " << b;
  }
  const auto g = extract_tree(real_affine(f, 2.0, 0.0), fast()).tree;
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_NEAR(g.edges[0].interval.lo, -1.0, 1e-9);
  EXPECT_NEAR(g.edges[0].interval.hi, 1.0, 1e-9);
}

// Property: for random Helson functions the extracted tree validates, obeys
// the sum rule, and its profile matches direct root counting; every interval
// endpoint is a critical value, a boundary critical value or infinite.
TEST(ExtractTree, RandomFunctionsAgreeWithSampling) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 12; ++trial) {
    const auto f = testing_support::random_helson_up_to(rng, 3);
    const auto res = extract_tree(f, fast());
    EXPECT_TRUE(tree::validate(res.tree).ok());
    const auto p = tree::profile(res.tree);
    EXPECT_EQ(std::make_pair(p.v_plus, p.v_minus), halfplane_valences(f));
    const auto rep = crosscheck(f, res.tree, 60, 100 + trial, 1e-3);
    EXPECT_TRUE(rep.ok()) << "trial " << trial << ": " << rep.mismatches.size() << " mismatches";
    for (const auto& e : res.tree.edges) {
      for (double x : {e.interval.lo, e.interval.hi}) {
        if (std::isinf(x)) continue;
        bool known = false;
        for (double c : res.breakpoint_candidates) known = known || std::abs(c - x) < 1e-9;
        EXPECT_TRUE(known) << x;
      }
    }
  }
}

TEST(ExtractTree, InvalidResolutionRejected) {
  try {
    partition(phi1(), 16);
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}
