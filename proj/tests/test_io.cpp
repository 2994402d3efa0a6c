#include <gtest/gtest.h>

#include "smirnov/io.hpp"

using namespace smirnov;
using io::json;
using tree::PlaneValenceTree;
using tree::Sign;

namespace {

ErrorCode parse_code(const std::string& text) {
  try {
    io::function_from_json(io::parse_text(text, "test"));
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

PlaneValenceTree koebe_tree() {
  PlaneValenceTree t;
  t.nodes = {{"u", Sign::Plus, 1}, {"l", Sign::Minus, 1}};
  t.edges = {{"u", "l", {-0.25, INFINITY}}};
  return t;
}

}  // namespace

TEST(Json, BlaschkeRoundTrip) {
  const FiniteBlaschkeProduct b({cplx(0.25, -0.5), cplx(-0.1, 0.0)}, cplx(0.0, 1.0));
  const auto c = io::blaschke_from_json(io::blaschke_to_json(b));
  ASSERT_EQ(c.zeros().size(), 2u);
  EXPECT_EQ(c.zeros()[0], b.zeros()[0]);
  EXPECT_EQ(c.constant(), b.constant());
  EXPECT_EQ(io::blaschke_to_json(b).dump(), R"({"constant":[0.0,1.0],"zeros":[[0.25,-0.5],[-0.1,0.0]]})");
}

TEST(Json, FunctionFormsAgree) {
  const auto a = io::function_from_json(json::parse(R"({"num": [0, 1], "den": [1, -2, 1]})"));
  const auto b = io::function_from_json(io::function_to_json(a));
  const cplx z(0.3, 0.4);
  EXPECT_LT(std::abs(a.eval(z).value - z / ((1.0 - z) * (1.0 - z))), 1e-14);
  EXPECT_LT(std::abs(a.eval(z).value - b.eval(z).value), 1e-14);
  // Blaschke form of the Helson-completed function reproduces it.
  const auto h = with_helson(a);
  const json hj = io::function_to_json(h);
  ASSERT_TRUE(hj.contains("b1"));
  json only_pair = {{"b1", hj["b1"]}, {"b2", hj["b2"]}};
  EXPECT_LT(std::abs(io::function_from_json(only_pair).eval(z).value - a.eval(z).value), 1e-10);
}

TEST(Json, ParseErrors) {
  EXPECT_EQ(parse_code("{\"num\": [1, 2"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code("[1, 2]"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"b1": {"zeros": []}})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"num": ["x"], "den": [1]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"num": [[1, 2, 3]], "den": [1]})"), ErrorCode::ParseError);
}

TEST(Json, TreeRoundTripWithInfinity) {
  const PlaneValenceTree t = koebe_tree();
  const json j = io::tree_to_json(t);
  EXPECT_TRUE(j["edges"][0]["interval"][1].is_null());
  const PlaneValenceTree u = io::tree_from_json(j);
  EXPECT_EQ(u.edges[0].interval.hi, INFINITY);
  EXPECT_TRUE(tree::is_isomorphic_within(t, u, 0.0));
  const auto low = io::tree_from_json(json::parse(
      R"({"nodes": [{"id": "a", "sign": "-", "valence": 1}, {"id": "b", "sign": "+", "valence": 1}],
          "edges": [{"a": "a", "b": "b", "interval": [null, 2]}]})"));
  EXPECT_EQ(low.edges[0].interval.lo, -INFINITY);
  EXPECT_EQ(low.nodes[0].sign, Sign::Minus);
}

TEST(Json, TreeRejectsBadSign) {
  try {
    io::tree_from_json(json::parse(R"({"nodes": [{"id": "a", "sign": "*", "valence": 1}]})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.module(), "io");
  }
}

TEST(Dot, LabelsUseHalfPlaneAndInfinity) {
  const std::string dot = io::to_dot(koebe_tree());
  EXPECT_NE(dot.find("label=\"ℂ₊: 1\""), std::string::npos);
  EXPECT_NE(dot.find("label=\"ℂ₋: 1\""), std::string::npos);
  EXPECT_NE(dot.find("label=\"(-0.25, ∞)\""), std::string::npos);
}

TEST(Svg, DeterministicAndLabelled) {
  const auto phi = from_rational(poly::ComplexPolynomial({0.0, 1.0}), poly::ComplexPolynomial({1.0, -2.0, 1.0}));
  extract::ExtractOptions opt;
  opt.resolution = 128;
  const auto a = io::render_svg(extract::extract_tree(phi, opt));
  const auto b = io::render_svg(extract::extract_tree(phi, opt));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("#cfe3f7"), std::string::npos);
  EXPECT_NE(a.find("#3b5b8a"), std::string::npos);
  EXPECT_NE(a.find("<polyline"), std::string::npos);
  EXPECT_NE(a.find("ℂ₊: 1"), std::string::npos);
}
