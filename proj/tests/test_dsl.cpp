#include <random>
#include <string>

#include "doctest.h"
#include "gen.hpp"
#include "relichoice/dsl.hpp"
#include "relichoice/model.hpp"

using namespace relichoice;
using model::ExprKind;
using model::SystemExpr;
using model::SystemSpec;

namespace {

// Span must point inside the source text, 1-based.
void check_span_in_bounds(const ParseError& e, const std::string& text) {
  int lines = 1;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(e.span().line >= 1);
  CHECK(e.span().line <= lines);
  CHECK(e.span().column >= 1);
  CHECK(e.span().length >= 1);
}

ParseError capture(const std::string& text) {
  try {
    dsl::parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected ParseError");
  return ParseError(ParseErrorKind::syntax, {}, "unreachable");
}

}  // namespace

TEST_CASE("parse a minimal program") {
  auto spec = dsl::parse("comp A(lambda=1.0, t0=0) system: A");
  CHECK(spec.root == SystemExpr::leaf("A"));
  CHECK(spec.components.at("A").lambda == 1.0);
  CHECK(spec.components.at("A").t0 == 0.0);
  CHECK(!spec.components.at("A").p.has_value());
}

TEST_CASE("residual branch takes the remaining weight") {
  auto spec = dsl::parse(
      "comp A(lambda=0.1,t0=0) comp B(lambda=0.2,t0=0) system: [0.6: A, _: B]");
  REQUIRE(spec.root.kind == ExprKind::prob_choice);
  CHECK(spec.root.weights[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(spec.root.weights[1] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("weights that do not sum to 1 are rejected") {
  auto e = capture(
      "comp A(lambda=0.1,t0=0) comp B(lambda=0.2,t0=0) system: [0.7: A, 0.7: B]");
  CHECK(e.kind() == ParseErrorKind::semantic);
  CHECK(e.message().find("weights sum 1.4") != std::string::npos);
}

TEST_CASE("duplicate residual branches are rejected") {
  auto e = capture(
      "comp A(lambda=1,t0=0) comp B(lambda=1,t0=0) system: [_: A, _: B]");
  CHECK(e.message() == "more than one residual branch");
}

TEST_CASE("undeclared components are rejected with a location") {
  const std::string text = "comp A(lambda=1, t0=0)\nsystem: A; Zed";
  auto e = capture(text);
  CHECK(e.kind() == ParseErrorKind::semantic);
  CHECK(e.message() == "undeclared component Zed");
  CHECK(e.span().line == 2);
  CHECK(e.span().column == 12);
  CHECK(e.span().length == 3);
  check_span_in_bounds(e, text);
}

TEST_CASE("bad component parameters are rejected") {
  CHECK(capture("comp A(lambda=0, t0=0) system: A").message() ==
        "lambda 0 must be > 0");
  CHECK(capture("comp A(lambda=1, t0=-2) system: A").message() ==
        "t0 -2 must be >= 0");
  CHECK(capture("comp A(lambda=1, t0=0, p=1.5) system: A").message() ==
        "p 1.5 outside [0, 1]");
  CHECK(capture("comp A(lambda=1,t0=0) comp A(lambda=2,t0=0) system: A")
            .message() == "duplicate component id A");
}

TEST_CASE("lexer rejects stray characters") {
  auto e = capture("comp A(lambda=1, t0=0) system: A $");
  CHECK(e.kind() == ParseErrorKind::lex);
  CHECK(e.message().find("unknown token") != std::string::npos);
}

TEST_CASE("syntax errors point at the unexpected token") {
  auto e = capture("comp A(lambda=1 t0=0) system: A");
  CHECK(e.kind() == ParseErrorKind::syntax);
  check_span_in_bounds(e, "comp A(lambda=1 t0=0) system: A");
}

TEST_CASE("comments and uniform sugar") {
  auto spec = dsl::parse(
      "# a choice between equals\n"
      "comp a(lambda=1, t0=0)  # inline\n"
      "comp b(lambda=2, t0=0)\n"
      "system: <a | b>\n");
  CHECK(spec.root == SystemExpr::prob_choice({0.5, 0.5}, {SystemExpr::leaf("a"),
                                                          SystemExpr::leaf("b")}));
}

TEST_CASE("series flattens through parentheses") {
  auto spec = dsl::parse(
      "comp a(lambda=1,t0=0) comp b(lambda=1,t0=0) comp c(lambda=1,t0=0)\n"
      "system: a; (b; c)");
  CHECK(spec.root ==
        SystemExpr::series({SystemExpr::leaf("a"), SystemExpr::leaf("b"),
                            SystemExpr::leaf("c")}));
}

TEST_CASE("nested choices parse") {
  auto spec = dsl::parse(
      "comp a(lambda=1,t0=0) comp b(lambda=1,t0=1) comp c(lambda=0.5,t0=0)\n"
      "system: a; [0.25: b, _: (c; a)]");
  REQUIRE(spec.root.kind == ExprKind::series);
  REQUIRE(spec.root.children.size() == 2);
  CHECK(spec.root.children[1].kind == ExprKind::prob_choice);
  CHECK(spec.root.children[1].children[1].kind == ExprKind::series);
}

TEST_CASE("format emits parseable text") {
  SystemSpec spec;
  spec.components["A"] = {"A", 1.0, 0.0, {}};
  spec.root = SystemExpr::leaf("A");
  CHECK(dsl::format(spec) == "comp A(lambda=1, t0=0)\nsystem: A\n");

  spec.components["B"] = {"B", 0.25, 1.5, 0.75};
  spec.root = SystemExpr::prob_choice({0.6, 0.4}, {SystemExpr::leaf("A"),
                                                   SystemExpr::leaf("B")});
  const std::string text = dsl::format(spec);
  CHECK(text.find("[0.6: A, 0.4: B]") != std::string::npos);
  CHECK(text.find("p=0.75") != std::string::npos);
  CHECK(model::structurally_equal(dsl::parse(text), spec));
}

TEST_CASE("parse after format is identity on random canonical specs") {
  std::mt19937_64 rng(777);
  for (int i = 0; i < 100; ++i) {
    SystemSpec spec = testgen::random_spec(rng, 3, i % 2 == 0);
    spec.root = model::canonicalize(spec.root);
    const SystemSpec back = dsl::parse(dsl::format(spec));
    CHECK(model::structurally_equal(back, spec));
  }
}

TEST_CASE("json happy path with residual weight") {
  const std::string text = R"({
    "name": "demo",
    "components": [
      {"id": "a", "lambda": 0.5, "t0": 0.5, "p": 0.9},
      {"id": "b", "lambda": 2.0, "t0": 0.25}
    ],
    "system": {"choice": [
      {"weight": 0.6, "node": {"leaf": "a"}},
      {"weight": "residual", "node": {"leaf": "b"}}
    ]}
  })";
  auto spec = dsl::from_json(text);
  CHECK(spec.name == "demo");
  CHECK(spec.components.at("a").p == 0.9);
  REQUIRE(spec.root.kind == ExprKind::prob_choice);
  CHECK(spec.root.weights[1] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("json schema errors carry field paths") {
  auto path_of = [](const std::string& text) {
    try {
      dsl::from_json(text);
    } catch (const SchemaError& e) {
      return e.path();
    }
    FAIL("expected SchemaError");
    return std::string();
  };

  CHECK(path_of("") == "");  // empty file: "missing root"
  CHECK_THROWS_WITH_AS(dsl::from_json("   \n "), "missing root", SchemaError);
  CHECK_THROWS_AS(dsl::from_json("{nope"), SchemaError);   // invalid JSON
  CHECK_THROWS_AS(dsl::from_json("[1,2]"), SchemaError);   // root not object

  CHECK(path_of(R"({"components": [{"id":"a","lambda":-1,"t0":0}],
                    "system":{"leaf":"a"}})") == "components[0].lambda");
  CHECK(path_of(R"({"components": [{"id":"a","t0":0}],
                    "system":{"leaf":"a"}})") == "components[0].lambda");
  CHECK(path_of(R"({"components": [{"id":"a","lambda":1,"t0":0,"bogus":1}],
                    "system":{"leaf":"a"}})") == "components[0].bogus");
  CHECK(path_of(R"({"components": [{"id":"a","lambda":1,"t0":0}],
                    "system":{"leaf":"zzz"}})") == "system.leaf");
  CHECK(path_of(R"({"components": [{"id":"a","lambda":1,"t0":0},
                                   {"id":"b","lambda":1,"t0":0}],
                    "system":{"choice":[
                      {"weight":0.7,"node":{"leaf":"a"}},
                      {"weight":0.7,"node":{"leaf":"b"}}]}})") == "system.choice");
  CHECK(path_of(R"({"components": [{"id":"a","lambda":1,"t0":0}],
                    "system":{"leaf":"a"}, "extra": 1})") == "extra");
}

TEST_CASE("json round trip preserves structure and name") {
  std::mt19937_64 rng(13579);
  for (int i = 0; i < 100; ++i) {
    SystemSpec spec = testgen::random_spec(rng, 3, i % 3 == 0);
    spec.root = model::canonicalize(spec.root);
    spec.name = i % 2 ? "case-" + std::to_string(i) : "";
    const SystemSpec back = dsl::from_json(dsl::to_json(spec));
    CHECK(model::structurally_equal(back, spec));
    CHECK(back.name == spec.name);
  }
}

TEST_CASE("load_file dispatches on extension") {
  CHECK_THROWS_AS(dsl::load_file("/nonexistent/x.rel"), IoError);
  CHECK_THROWS_AS(dsl::load_file("/nonexistent/x.json"), IoError);
}
