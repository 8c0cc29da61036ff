#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relichoice/errors.hpp"

namespace relichoice::model {

/// Absolute tolerance for "choice weights sum to 1" checks.
inline constexpr double kWeightSumTolerance = 1e-9;

/// One physical component: exponential failure rate plus the time at which it
/// is installed and considered good as new.
struct ComponentParams {
  std::string id;
  double lambda = 1.0;          // failure rate, > 0
  double t0 = 0.0;              // installation time, >= 0
  std::optional<double> p;      // static success probability in [0,1]

  bool operator==(const ComponentParams&) const = default;
};

/// Selection probabilities of a probabilistic choice, one per branch.
using WeightVector = std::vector<double>;

enum class ExprKind { leaf, series, prob_choice, uniform_choice };

/// Recursive system topology. Series composes sub-systems so the system fails
/// when any one of them fails; a probabilistic choice uses exactly one branch
/// per deployment, branch k with probability weights[k]; a uniform choice is
/// sugar for equal weights.
struct SystemExpr {
  ExprKind kind = ExprKind::leaf;
  std::string component;            // leaf only
  std::vector<SystemExpr> children; // series and choices
  WeightVector weights;             // prob_choice only, same arity as children

  static SystemExpr leaf(std::string id);
  static SystemExpr series(std::vector<SystemExpr> children);
  static SystemExpr prob_choice(WeightVector weights,
                                std::vector<SystemExpr> children);
  static SystemExpr uniform_choice(std::vector<SystemExpr> children);

  bool operator==(const SystemExpr&) const = default;
};

/// A complete system: component table plus topology. `name` is free-form
/// metadata and takes no part in structural identity.
struct SystemSpec {
  std::string name;
  std::map<std::string, ComponentParams> components;
  SystemExpr root;
};

/// Compares components and topology, ignoring metadata.
bool structurally_equal(const SystemSpec& a, const SystemSpec& b);

struct Violation {
  std::string where;    // node or field path, e.g. "root[1]" or "component A"
  std::string message;
};

/// Checks every type invariant: component parameter ranges, id uniqueness,
/// leaf reference resolution, choice arity and weight sums, canonical form.
/// Violations are data, not exceptions; an empty result means the spec is safe
/// for every analysis and simulation entry point.
std::vector<Violation> validate(const SystemSpec& spec);

/// Flattens series-in-series and desugars uniform choices into explicit equal
/// weights. Idempotent; preserves success probability for every probability
/// assignment. Throws DomainError on malformed arity (< 2 children).
SystemExpr canonicalize(const SystemExpr& expr);

}  // namespace relichoice::model
