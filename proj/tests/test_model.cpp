#include <string>
#include <vector>

#include "doctest.h"
#include "gen.hpp"
#include "relichoice/model.hpp"

using namespace relichoice;
using model::ComponentParams;
using model::SystemExpr;
using model::SystemSpec;

namespace {

SystemSpec two_leaf_spec() {
  SystemSpec spec;
  spec.components["A"] = {"A", 1.0, 0.0, {}};
  spec.components["B"] = {"B", 2.0, 0.5, {}};
  spec.root = SystemExpr::series({SystemExpr::leaf("A"), SystemExpr::leaf("B")});
  return spec;
}

bool has_violation(const std::vector<model::Violation>& vs,
                   const std::string& needle) {
  for (const auto& v : vs)
    if (v.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("factories build the expected nodes") {
  auto l = SystemExpr::leaf("A");
  CHECK(l.kind == model::ExprKind::leaf);
  CHECK(l.component == "A");

  auto s = SystemExpr::series({SystemExpr::leaf("A"), SystemExpr::leaf("B")});
  CHECK(s.kind == model::ExprKind::series);
  CHECK(s.children.size() == 2);

  auto p = SystemExpr::prob_choice({0.3, 0.7},
                                   {SystemExpr::leaf("A"), SystemExpr::leaf("B")});
  CHECK(p.kind == model::ExprKind::prob_choice);
  CHECK(p.weights == model::WeightVector{0.3, 0.7});

  auto u = SystemExpr::uniform_choice({SystemExpr::leaf("A"), SystemExpr::leaf("B")});
  CHECK(u.kind == model::ExprKind::uniform_choice);
  CHECK(u.weights.empty());
}

TEST_CASE("validate accepts a well-formed spec") {
  CHECK(model::validate(two_leaf_spec()).empty());
}

TEST_CASE("validate flags weight sums away from 1") {
  SystemSpec spec = two_leaf_spec();
  spec.root = SystemExpr::prob_choice({0.6, 0.5},
                                      {SystemExpr::leaf("A"), SystemExpr::leaf("B")});
  auto vs = model::validate(spec);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].message.find("weights sum 1.1") != std::string::npos);
}

TEST_CASE("validate flags unresolved references") {
  SystemSpec spec = two_leaf_spec();
  spec.root = SystemExpr::leaf("Z");
  auto vs = model::validate(spec);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].message == "unresolved reference Z");
}

TEST_CASE("validate flags bad component parameters") {
  SystemSpec spec = two_leaf_spec();
  spec.components["A"].lambda = 0.0;
  CHECK(has_violation(model::validate(spec), "lambda"));

  spec = two_leaf_spec();
  spec.components["B"].t0 = -1.0;
  CHECK(has_violation(model::validate(spec), "t0"));

  spec = two_leaf_spec();
  spec.components["A"].p = 1.5;
  CHECK(has_violation(model::validate(spec), "p"));

  spec = two_leaf_spec();
  spec.components["A"].id = "Mismatch";
  CHECK(!model::validate(spec).empty());
}

TEST_CASE("validate flags arity problems") {
  SystemSpec spec = two_leaf_spec();
  spec.root = SystemExpr::series({SystemExpr::leaf("A")});
  CHECK(!model::validate(spec).empty());

  spec = two_leaf_spec();
  spec.root.kind = model::ExprKind::prob_choice;
  spec.root.weights = {0.5};  // two children, one weight
  CHECK(!model::validate(spec).empty());
}

TEST_CASE("validate points at the offending node") {
  SystemSpec spec = two_leaf_spec();
  spec.root = SystemExpr::series(
      {SystemExpr::leaf("A"),
       SystemExpr::prob_choice({1.0, 0.25},
                               {SystemExpr::leaf("B"), SystemExpr::leaf("nope")})});
  auto vs = model::validate(spec);
  bool saw_path = false;
  for (const auto& v : vs) saw_path = saw_path || v.where.find("root[1]") == 0;
  CHECK(saw_path);
}

TEST_CASE("canonicalize desugars uniform choices") {
  auto expr = SystemExpr::uniform_choice({SystemExpr::leaf("A"), SystemExpr::leaf("B")});
  auto canon = model::canonicalize(expr);
  CHECK(canon == SystemExpr::prob_choice({0.5, 0.5}, {SystemExpr::leaf("A"),
                                                      SystemExpr::leaf("B")}));
}

TEST_CASE("canonicalize flattens nested series") {
  auto expr = SystemExpr::series(
      {SystemExpr::leaf("A"),
       SystemExpr::series({SystemExpr::leaf("B"), SystemExpr::leaf("C")})});
  auto canon = model::canonicalize(expr);
  CHECK(canon == SystemExpr::series({SystemExpr::leaf("A"), SystemExpr::leaf("B"),
                                     SystemExpr::leaf("C")}));
}

TEST_CASE("canonicalize keeps canonical input unchanged") {
  auto expr = SystemExpr::prob_choice({0.3, 0.7},
                                      {SystemExpr::leaf("A"), SystemExpr::leaf("B")});
  CHECK(model::canonicalize(expr) == expr);
}

TEST_CASE("canonicalize is idempotent on random expressions") {
  std::mt19937_64 rng(20240811);
  for (int i = 0; i < 50; ++i) {
    auto spec = testgen::random_spec(rng, 4);
    auto once = model::canonicalize(spec.root);
    CHECK(model::canonicalize(once) == once);
  }
}

TEST_CASE("canonicalize rejects undersized choices") {
  auto bad = SystemExpr::uniform_choice({SystemExpr::leaf("A"), SystemExpr::leaf("B")});
  bad.children.pop_back();
  CHECK_THROWS_AS(model::canonicalize(bad), DomainError);
}

TEST_CASE("structural equality ignores the name") {
  SystemSpec a = two_leaf_spec();
  SystemSpec b = two_leaf_spec();
  b.name = "production";
  CHECK(model::structurally_equal(a, b));
  b.components["A"].lambda = 3.0;
  CHECK(!model::structurally_equal(a, b));
}
