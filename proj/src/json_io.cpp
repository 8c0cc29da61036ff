#include <cmath>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "format_util.hpp"
#include "relichoice/dsl.hpp"

namespace relichoice::dsl {

using model::ComponentParams;
using model::ExprKind;
using model::SystemExpr;
using model::SystemSpec;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  throw SchemaError(path, msg);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      bad(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
  }
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "must be a number");
  return v.get<double>();
}

SystemExpr parse_node(const json& v, const std::string& path,
                      const SystemSpec& spec) {
  if (!v.is_object() || v.size() != 1) {
    bad(path, "node must be an object with exactly one of leaf/series/choice/uniform");
  }
  const auto it = v.begin();
  const std::string& key = it.key();
  const json& body = it.value();

  if (key == "leaf") {
    if (!body.is_string()) bad(path + ".leaf", "must be a component id string");
    const std::string id = body.get<std::string>();
    if (!spec.components.count(id)) {
      bad(path + ".leaf", "unresolved reference " + id);
    }
    return SystemExpr::leaf(id);
  }
  if (key == "series") {
    if (!body.is_array()) bad(path + ".series", "must be an array of nodes");
    if (body.size() < 2) bad(path + ".series", "needs at least 2 children");
    std::vector<SystemExpr> kids;
    for (std::size_t i = 0; i < body.size(); ++i) {
      kids.push_back(parse_node(body[i], path + ".series[" + std::to_string(i) + "]", spec));
    }
    return SystemExpr::series(std::move(kids));
  }
  if (key == "choice") {
    if (!body.is_array()) bad(path + ".choice", "must be an array of branches");
    if (body.size() < 2) bad(path + ".choice", "needs at least 2 branches");
    std::vector<SystemExpr> kids;
    std::vector<double> weights;
    std::optional<std::size_t> residual_index;
    for (std::size_t i = 0; i < body.size(); ++i) {
      const std::string bpath = path + ".choice[" + std::to_string(i) + "]";
      const json& branch = body[i];
      if (!branch.is_object()) bad(bpath, "branch must be an object");
      reject_unknown_keys(branch, {"weight", "node"}, bpath);
      if (!branch.contains("weight")) bad(bpath + ".weight", "missing required key");
      if (!branch.contains("node")) bad(bpath + ".node", "missing required key");
      const json& w = branch["weight"];
      if (w.is_string()) {
        if (w.get<std::string>() != "residual") {
          bad(bpath + ".weight", "must be a number or \"residual\"");
        }
        if (residual_index) bad(bpath + ".weight", "more than one residual branch");
        residual_index = i;
        weights.push_back(0.0);
      } else {
        const double wv = require_number(w, bpath + ".weight");
        if (!std::isfinite(wv) || wv < 0.0 || wv > 1.0) {
          bad(bpath + ".weight", "weight " + detail::human(wv) + " outside [0, 1]");
        }
        weights.push_back(wv);
      }
      kids.push_back(parse_node(branch["node"], bpath + ".node", spec));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (residual_index && i == *residual_index) continue;
      sum += weights[i];
    }
    if (residual_index) {
      const double r = 1.0 - sum;
      if (r < -model::kWeightSumTolerance) {
        bad(path + ".choice", "residual weight " + detail::human(r) + " is negative");
      }
      weights[*residual_index] = std::min(1.0, std::max(0.0, r));
    } else if (std::fabs(sum - 1.0) > model::kWeightSumTolerance) {
      bad(path + ".choice", "weights sum " + detail::human(sum) + " ≠ 1");
    }
    return SystemExpr::prob_choice(std::move(weights), std::move(kids));
  }
  if (key == "uniform") {
    if (!body.is_array()) bad(path + ".uniform", "must be an array of nodes");
    if (body.size() < 2) bad(path + ".uniform", "needs at least 2 children");
    std::vector<SystemExpr> kids;
    for (std::size_t i = 0; i < body.size(); ++i) {
      kids.push_back(parse_node(body[i], path + ".uniform[" + std::to_string(i) + "]", spec));
    }
    return SystemExpr::uniform_choice(std::move(kids));
  }
  bad(path, "node must have exactly one of leaf/series/choice/uniform");
}

ordered_json node_to_json(const SystemExpr& e) {
  ordered_json j;
  switch (e.kind) {
    case ExprKind::leaf:
      j["leaf"] = e.component;
      return j;
    case ExprKind::series: {
      ordered_json arr = ordered_json::array();
      for (const auto& c : e.children) arr.push_back(node_to_json(c));
      j["series"] = std::move(arr);
      return j;
    }
    case ExprKind::prob_choice: {
      ordered_json arr = ordered_json::array();
      for (std::size_t k = 0; k < e.children.size(); ++k) {
        ordered_json b;
        b["weight"] = e.weights[k];
        b["node"] = node_to_json(e.children[k]);
        arr.push_back(std::move(b));
      }
      j["choice"] = std::move(arr);
      return j;
    }
    case ExprKind::uniform_choice: {
      ordered_json arr = ordered_json::array();
      for (const auto& c : e.children) arr.push_back(node_to_json(c));
      j["uniform"] = std::move(arr);
      return j;
    }
  }
  return j;
}

bool only_whitespace(const std::string& s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

SystemSpec from_json(const std::string& text) {
  if (only_whitespace(text)) bad("", "missing root");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("", "document root must be an object");
  reject_unknown_keys(doc, {"name", "components", "system"}, "");

  SystemSpec spec;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) bad("name", "must be a string");
    spec.name = doc["name"].get<std::string>();
  }
  if (!doc.contains("components")) bad("components", "missing required key");
  const json& comps = doc["components"];
  if (!comps.is_array() || comps.empty()) {
    bad("components", "must be a non-empty array");
  }
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string cpath = "components[" + std::to_string(i) + "]";
    const json& c = comps[i];
    if (!c.is_object()) bad(cpath, "must be an object");
    reject_unknown_keys(c, {"id", "lambda", "t0", "p"}, cpath);
    if (!c.contains("id")) bad(cpath + ".id", "missing required key");
    if (!c["id"].is_string() || c["id"].get<std::string>().empty()) {
      bad(cpath + ".id", "must be a non-empty string");
    }
    ComponentParams cp;
    cp.id = c["id"].get<std::string>();
    if (spec.components.count(cp.id)) {
      bad(cpath + ".id", "duplicate component id " + cp.id);
    }
    if (!c.contains("lambda")) bad(cpath + ".lambda", "missing required key");
    cp.lambda = require_number(c["lambda"], cpath + ".lambda");
    if (!std::isfinite(cp.lambda) || cp.lambda <= 0.0) {
      bad(cpath + ".lambda", "lambda " + detail::human(cp.lambda) + " must be > 0");
    }
    if (!c.contains("t0")) bad(cpath + ".t0", "missing required key");
    cp.t0 = require_number(c["t0"], cpath + ".t0");
    if (!std::isfinite(cp.t0) || cp.t0 < 0.0) {
      bad(cpath + ".t0", "t0 " + detail::human(cp.t0) + " must be >= 0");
    }
    if (c.contains("p")) {
      const double p = require_number(c["p"], cpath + ".p");
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        bad(cpath + ".p", "p " + detail::human(p) + " outside [0, 1]");
      }
      cp.p = p;
    }
    spec.components.emplace(cp.id, std::move(cp));
  }
  if (!doc.contains("system")) bad("system", "missing required key");
  spec.root = model::canonicalize(parse_node(doc["system"], "system", spec));
  return spec;
}

std::string to_json(const SystemSpec& spec) {
  ordered_json doc;
  if (!spec.name.empty()) doc["name"] = spec.name;
  ordered_json comps = ordered_json::array();
  for (const auto& [id, cp] : spec.components) {
    ordered_json c;
    c["id"] = id;
    c["lambda"] = cp.lambda;
    c["t0"] = cp.t0;
    if (cp.p) c["p"] = *cp.p;
    comps.push_back(std::move(c));
  }
  doc["components"] = std::move(comps);
  doc["system"] = node_to_json(spec.root);
  return doc.dump(2) + "\n";
}

}  // namespace relichoice::dsl
