#include "relichoice/model.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace relichoice::model {

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

SystemExpr SystemExpr::leaf(std::string id) {
  SystemExpr e;
  e.kind = ExprKind::leaf;
  e.component = std::move(id);
  return e;
}

SystemExpr SystemExpr::series(std::vector<SystemExpr> children) {
  SystemExpr e;
  e.kind = ExprKind::series;
  e.children = std::move(children);
  return e;
}

SystemExpr SystemExpr::prob_choice(WeightVector weights,
                                   std::vector<SystemExpr> children) {
  SystemExpr e;
  e.kind = ExprKind::prob_choice;
  e.weights = std::move(weights);
  e.children = std::move(children);
  return e;
}

SystemExpr SystemExpr::uniform_choice(std::vector<SystemExpr> children) {
  SystemExpr e;
  e.kind = ExprKind::uniform_choice;
  e.children = std::move(children);
  return e;
}

bool structurally_equal(const SystemSpec& a, const SystemSpec& b) {
  return a.components == b.components && a.root == b.root;
}

namespace {

void validate_expr(const SystemExpr& e, const SystemSpec& spec,
                   const std::string& path, bool parent_is_series,
                   std::vector<Violation>& out) {
  switch (e.kind) {
    case ExprKind::leaf:
      if (!spec.components.count(e.component)) {
        out.push_back({path, "unresolved reference " + e.component});
      }
      return;
    case ExprKind::series: {
      if (e.children.size() < 2) {
        out.push_back({path, "series needs at least 2 children"});
      }
      if (parent_is_series) {
        out.push_back({path, "series nested directly in series (not canonical)"});
      }
      if (!e.weights.empty()) {
        out.push_back({path, "series carries weights"});
      }
      std::size_t i = 0;
      for (const auto& c : e.children) {
        validate_expr(c, spec, path + "[" + std::to_string(i++) + "]", true, out);
      }
      return;
    }
    case ExprKind::prob_choice: {
      if (e.children.size() < 2) {
        out.push_back({path, "choice needs at least 2 branches"});
      }
      if (e.weights.size() != e.children.size()) {
        out.push_back({path, "weight count does not match branch count"});
      } else {
        double sum = 0.0;
        for (double w : e.weights) {
          if (!(w >= 0.0 && w <= 1.0) || !std::isfinite(w)) {
            out.push_back({path, "weight " + fmt_num(w) + " outside [0, 1]"});
          }
          sum += w;
        }
        if (std::fabs(sum - 1.0) > kWeightSumTolerance) {
          out.push_back({path, "weights sum " + fmt_num(sum) + " ≠ 1"});
        }
      }
      std::size_t i = 0;
      for (const auto& c : e.children) {
        validate_expr(c, spec, path + "[" + std::to_string(i++) + "]", false, out);
      }
      return;
    }
    case ExprKind::uniform_choice: {
      out.push_back({path, "uniform choice not desugared (not canonical)"});
      if (e.children.size() < 2) {
        out.push_back({path, "choice needs at least 2 branches"});
      }
      std::size_t i = 0;
      for (const auto& c : e.children) {
        validate_expr(c, spec, path + "[" + std::to_string(i++) + "]", false, out);
      }
      return;
    }
  }
}

}  // namespace

std::vector<Violation> validate(const SystemSpec& spec) {
  std::vector<Violation> out;
  for (const auto& [id, cp] : spec.components) {
    const std::string where = "component " + (id.empty() ? cp.id : id);
    if (id.empty()) out.push_back({where, "empty component id"});
    if (id != cp.id) out.push_back({where, "id field does not match table key"});
    if (!(cp.lambda > 0.0) || !std::isfinite(cp.lambda)) {
      out.push_back({where, "lambda " + fmt_num(cp.lambda) + " must be > 0 and finite"});
    }
    if (!(cp.t0 >= 0.0) || !std::isfinite(cp.t0)) {
      out.push_back({where, "t0 " + fmt_num(cp.t0) + " must be >= 0 and finite"});
    }
    if (cp.p && (!(*cp.p >= 0.0 && *cp.p <= 1.0) || !std::isfinite(*cp.p))) {
      out.push_back({where, "p " + fmt_num(*cp.p) + " outside [0, 1]"});
    }
  }
  validate_expr(spec.root, spec, "root", false, out);
  return out;
}

SystemExpr canonicalize(const SystemExpr& expr) {
  switch (expr.kind) {
    case ExprKind::leaf:
      return expr;
    case ExprKind::series: {
      if (expr.children.size() < 2) {
        throw DomainError("malformed expression: series needs at least 2 children");
      }
      std::vector<SystemExpr> flat;
      for (const auto& c : expr.children) {
        SystemExpr cc = canonicalize(c);
        if (cc.kind == ExprKind::series) {
          for (auto& gc : cc.children) flat.push_back(std::move(gc));
        } else {
          flat.push_back(std::move(cc));
        }
      }
      return SystemExpr::series(std::move(flat));
    }
    case ExprKind::prob_choice: {
      if (expr.children.size() < 2) {
        throw DomainError("malformed expression: choice needs at least 2 branches");
      }
      if (expr.weights.size() != expr.children.size()) {
        throw DomainError("malformed expression: weight count does not match branch count");
      }
      std::vector<SystemExpr> kids;
      kids.reserve(expr.children.size());
      for (const auto& c : expr.children) kids.push_back(canonicalize(c));
      return SystemExpr::prob_choice(expr.weights, std::move(kids));
    }
    case ExprKind::uniform_choice: {
      if (expr.children.size() < 2) {
        throw DomainError("malformed expression: choice needs at least 2 branches");
      }
      const double w = 1.0 / static_cast<double>(expr.children.size());
      std::vector<SystemExpr> kids;
      kids.reserve(expr.children.size());
      for (const auto& c : expr.children) kids.push_back(canonicalize(c));
      return SystemExpr::prob_choice(WeightVector(expr.children.size(), w),
                                     std::move(kids));
    }
  }
  throw DomainError("malformed expression: unknown node kind");
}

}  // namespace relichoice::model
