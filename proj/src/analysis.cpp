#include "relichoice/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "format_util.hpp"
#include "numeric.hpp"

namespace relichoice::analysis {

using model::ComponentParams;
using model::ExprKind;
using model::SystemExpr;
using model::SystemSpec;

namespace {

constexpr double kQuadratureTol = 1e-13;
constexpr double kHorizonFloor = 1e-16;
constexpr double kHorizonSpan = 60.0;
constexpr double kRteTimeTol = 1e-9;

const ComponentParams& leaf_params(const SystemSpec& spec, const std::string& id) {
  auto it = spec.components.find(id);
  if (it == spec.components.end()) {
    throw DomainError("unresolved reference " + id);
  }
  return it->second;
}

template <class LeafFn>
double eval_tree(const SystemExpr& e, LeafFn&& leaf) {
  switch (e.kind) {
    case ExprKind::leaf:
      return leaf(e.component);
    case ExprKind::series: {
      double prod = 1.0;
      for (const auto& c : e.children) prod *= eval_tree(c, leaf);
      return prod;
    }
    case ExprKind::prob_choice: {
      double sum = 0.0;
      for (std::size_t k = 0; k < e.children.size(); ++k) {
        sum += e.weights[k] * eval_tree(e.children[k], leaf);
      }
      return sum;
    }
    case ExprKind::uniform_choice: {
      double sum = 0.0;
      for (const auto& c : e.children) sum += eval_tree(c, leaf);
      return sum / static_cast<double>(e.children.size());
    }
  }
  throw DomainError("malformed expression: unknown node kind");
}

void collect_leaf_ids(const SystemExpr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::leaf) {
    out.insert(e.component);
    return;
  }
  for (const auto& c : e.children) collect_leaf_ids(c, out);
}

struct LeafStats {
  double max_t0 = 0.0;
  double min_t0 = 0.0;
  double min_lambda = std::numeric_limits<double>::infinity();
  std::vector<double> t0s;  // distinct installation times of reachable leaves
};

LeafStats leaf_stats(const SystemSpec& spec) {
  std::set<std::string> ids;
  collect_leaf_ids(spec.root, ids);
  LeafStats s;
  s.min_t0 = std::numeric_limits<double>::infinity();
  std::set<double> t0s;
  for (const auto& id : ids) {
    const auto& cp = leaf_params(spec, id);
    s.max_t0 = std::max(s.max_t0, cp.t0);
    s.min_t0 = std::min(s.min_t0, cp.t0);
    s.min_lambda = std::min(s.min_lambda, cp.lambda);
    t0s.insert(cp.t0);
  }
  if (ids.empty()) throw DomainError("system has no components");
  s.t0s.assign(t0s.begin(), t0s.end());
  return s;
}

// Child components of a flat series (or the single bare leaf).
std::vector<const ComponentParams*> series_parts(const SystemSpec& spec) {
  std::vector<const ComponentParams*> out;
  if (spec.root.kind == ExprKind::leaf) {
    out.push_back(&leaf_params(spec, spec.root.component));
    return out;
  }
  for (const auto& c : spec.root.children) {
    out.push_back(&leaf_params(spec, c.component));
  }
  return out;
}

struct ParallelParts {
  std::vector<double> weights, lambdas, t0s;
};

ParallelParts parallel_parts(const SystemSpec& spec) {
  ParallelParts p;
  for (std::size_t k = 0; k < spec.root.children.size(); ++k) {
    const auto& cp = leaf_params(spec, spec.root.children[k].component);
    p.weights.push_back(spec.root.weights[k]);
    p.lambdas.push_back(cp.lambda);
    p.t0s.push_back(cp.t0);
  }
  return p;
}

bool series_has_common_t0(const SystemSpec& spec) {
  const auto parts = series_parts(spec);
  for (const auto* cp : parts) {
    if (cp->t0 != parts.front()->t0) return false;
  }
  return true;
}

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("time " + detail::human(t) + " must be finite and >= 0");
  }
}

void check_rho(double rho) {
  if (!std::isfinite(rho) || !(rho > 0.0 && rho <= 1.0)) {
    throw DomainError("rho " + detail::human(rho) + " outside (0, 1]");
  }
}

}  // namespace

const char* to_string(Mode m) {
  return m == Mode::paper ? "paper" : "numeric";
}

const char* to_string(Shape s) {
  switch (s) {
    case Shape::flat_series: return "flat-series";
    case Shape::flat_parallel: return "flat-parallel";
    case Shape::nested: return "nested";
  }
  return "nested";
}

std::optional<Mode> mode_from_string(const std::string& s) {
  if (s == "numeric") return Mode::numeric;
  if (s == "paper") return Mode::paper;
  return std::nullopt;
}

std::optional<RteMethod> rte_method_from_string(const std::string& s) {
  if (s == "auto") return RteMethod::auto_pick;
  if (s == "closed-form") return RteMethod::closed_form;
  if (s == "quadratic") return RteMethod::quadratic;
  if (s == "numeric") return RteMethod::numeric;
  return std::nullopt;
}

Shape detect_shape(const SystemSpec& spec) {
  const SystemExpr& root = spec.root;
  if (root.kind == ExprKind::leaf) return Shape::flat_series;
  const bool all_leaves =
      std::all_of(root.children.begin(), root.children.end(),
                  [](const SystemExpr& c) { return c.kind == ExprKind::leaf; });
  if (root.kind == ExprKind::series && all_leaves) return Shape::flat_series;
  if (root.kind == ExprKind::prob_choice && all_leaves) return Shape::flat_parallel;
  return Shape::nested;
}

double success_probability(const SystemExpr& expr,
                           const std::map<std::string, double>& probs) {
  return eval_tree(expr, [&](const std::string& id) {
    auto it = probs.find(id);
    if (it == probs.end()) {
      throw DomainError("no probability for leaf " + id);
    }
    const double p = it->second;
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw DomainError("probability " + detail::human(p) + " for leaf " + id +
                        " outside [0, 1]");
    }
    return p;
  });
}

double success_probability(const SystemSpec& spec) {
  return eval_tree(spec.root, [&](const std::string& id) {
    const auto& cp = leaf_params(spec, id);
    if (!cp.p) {
      throw DomainError("component " + id + " has no static success probability");
    }
    return *cp.p;
  });
}

model::WeightVector assign_weights(const std::vector<double>& probs) {
  if (probs.size() < 2) {
    throw DomainError("assign_weights needs at least 2 paths");
  }
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw DomainError("probability " + detail::human(p) + " outside [0, 1]");
    }
  }
  const std::size_t certain =
      static_cast<std::size_t>(std::count(probs.begin(), probs.end(), 1.0));
  model::WeightVector w(probs.size(), 0.0);
  if (certain > 0) {
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] == 1.0) w[i] = 1.0 / static_cast<double>(certain);
    }
    return w;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    w[i] = probs[i] / (1.0 - probs[i]);  // odds
    total += w[i];
  }
  if (total <= 0.0) {
    throw DomainError("no viable path: every success probability is 0");
  }
  for (double& x : w) x /= total;
  return w;
}

double survival(const SystemSpec& spec, double t) {
  check_time(t);
  return eval_tree(spec.root, [&](const std::string& id) {
    const auto& cp = leaf_params(spec, id);
    if (t < cp.t0) return 1.0;
    return std::exp(-cp.lambda * (t - cp.t0));
  });
}

double integration_horizon(const SystemSpec& spec) {
  const LeafStats stats = leaf_stats(spec);
  const double cap = stats.max_t0 + kHorizonSpan / stats.min_lambda;
  double t = stats.max_t0 + 1.0 / stats.min_lambda;
  while (t < cap && survival(spec, t) >= kHorizonFloor) {
    t = stats.max_t0 + 2.0 * (t - stats.max_t0);
  }
  return std::min(t, cap);
}

double pdf(const SystemSpec& spec, double t) {
  check_time(t);
  switch (detect_shape(spec)) {
    case Shape::flat_series: {
      double rate_sum = 0.0, exponent = 0.0;
      for (const auto* cp : series_parts(spec)) {
        rate_sum += cp->lambda;
        exponent += cp->lambda * (t - cp->t0);
      }
      return rate_sum * std::exp(-exponent);
    }
    case Shape::flat_parallel: {
      const auto p = parallel_parts(spec);
      double f = 0.0;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        f += p.weights[i] * p.lambdas[i] *
             std::exp(-p.lambdas[i] * (t - p.t0s[i]));
      }
      return f;
    }
    case Shape::nested: {
      const double h = 1e-6 * std::max(1.0, t);
      const double a = std::max(0.0, t - h);
      const double b = t + h;
      return std::max(0.0, (survival(spec, a) - survival(spec, b)) / (b - a));
    }
  }
  throw DomainError("malformed expression: unknown node kind");
}

double sfr(const SystemSpec& spec, double t) {
  check_time(t);
  const LeafStats stats = leaf_stats(spec);
  if (t < stats.max_t0) {
    throw DomainError("sfr needs t >= max installation time " +
                      detail::human(stats.max_t0) + " (got " +
                      detail::human(t) + ")");
  }
  switch (detect_shape(spec)) {
    case Shape::flat_series: {
      double rate_sum = 0.0;
      for (const auto* cp : series_parts(spec)) rate_sum += cp->lambda;
      return rate_sum;
    }
    case Shape::flat_parallel: {
      const auto p = parallel_parts(spec);
      double m_sum = 0.0, ml_sum = 0.0;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        const double m =
            p.weights[i] * std::exp(-p.lambdas[i] * (t - p.t0s[i]));
        m_sum += m;
        ml_sum += m * p.lambdas[i];
      }
      if (m_sum <= 0.0) {
        throw DomainError("survival underflowed at t=" + detail::human(t));
      }
      return ml_sum / m_sum;
    }
    case Shape::nested: {
      const double h = 1e-6 * std::max(1.0, t);
      const double a = std::max(stats.max_t0, t - h);
      const double b = t + h;
      const double pt = survival(spec, t);
      if (pt < 1e-300) {
        throw DomainError("survival underflowed at t=" + detail::human(t));
      }
      return (survival(spec, a) - survival(spec, b)) / ((b - a) * pt);
    }
  }
  throw DomainError("malformed expression: unknown node kind");
}

namespace {

double mttf_numeric(const SystemSpec& spec) {
  const LeafStats stats = leaf_stats(spec);
  const double horizon = integration_horizon(spec);
  return numeric::integrate_piecewise(
      [&](double t) { return survival(spec, t); }, 0.0, horizon, stats.t0s,
      kQuadratureTol);
}

}  // namespace

double mttf(const SystemSpec& spec, Mode mode) {
  if (mode == Mode::numeric) return mttf_numeric(spec);
  switch (detect_shape(spec)) {
    case Shape::flat_series: {
      double rate_sum = 0.0;
      for (const auto* cp : series_parts(spec)) rate_sum += cp->lambda;
      return 1.0 / rate_sum;
    }
    case Shape::flat_parallel: {
      const auto p = parallel_parts(spec);
      double v = 0.0;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        v += p.weights[i] / p.lambdas[i];
      }
      return v;
    }
    case Shape::nested:
      throw ShapeError("closed-form mttf needs a flat shape");
  }
  throw ShapeError("closed-form mttf needs a flat shape");
}

double mtbf(const SystemSpec& spec, Mode mode) {
  if (mode == Mode::numeric) {
    // Expectation of the failure density, integrated by parts.
    const double horizon = integration_horizon(spec);
    return mttf_numeric(spec) - horizon * survival(spec, horizon);
  }
  switch (detect_shape(spec)) {
    case Shape::flat_series: {
      if (!series_has_common_t0(spec)) {
        throw ShapeError("series mtbf needs a common installation time");
      }
      const auto parts = series_parts(spec);
      double rate_sum = 0.0;
      for (const auto* cp : parts) rate_sum += cp->lambda;
      return parts.front()->t0 + 1.0 / rate_sum;
    }
    case Shape::flat_parallel: {
      const auto p = parallel_parts(spec);
      double v = 0.0;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        v += p.weights[i] * (p.t0s[i] + 1.0 / p.lambdas[i]);
      }
      return v;
    }
    case Shape::nested:
      throw ShapeError("closed-form mtbf needs a flat shape");
  }
  throw ShapeError("closed-form mtbf needs a flat shape");
}

double mttr(const SystemSpec& spec, Mode mode) {
  return std::max(0.0, mtbf(spec, mode) - mttf(spec, mode));
}

QuadraticRteRoots quadratic_rte_roots(const model::WeightVector& weights,
                                      const std::vector<double>& lambdas,
                                      const std::vector<double>& t0s,
                                      double rho) {
  if (weights.empty() || weights.size() != lambdas.size() ||
      weights.size() != t0s.size()) {
    throw DomainError("weights, lambdas, and t0s must have equal nonzero length");
  }
  check_rho(rho);
  double a2 = 0.0, b = 0.0, c = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i], l = lambdas[i], t0 = t0s[i];
    if (!(l > 0.0)) throw DomainError("lambda must be > 0");
    if (!(w >= 0.0)) throw DomainError("weights must be >= 0");
    a2 += w * l * l;
    b += w * l * l * t0 + w * l;
    c += w * (1.0 + l * t0 + 0.5 * l * l * t0 * t0);
  }
  if (a2 <= 0.0) throw DomainError("all weights are zero");
  QuadraticRteRoots out;
  out.Q = b * b - 2.0 * a2 * (c - rho);
  if (out.Q >= 0.0) {
    const double sq = std::sqrt(out.Q);
    out.t2 = (b - sq) / a2;
    out.t1 = (b + sq) / a2;
  }
  return out;
}

namespace {

RteResult rte_series_closed(const SystemSpec& spec, double rho) {
  double rate_sum = 0.0, weighted_t0 = 0.0;
  for (const auto* cp : series_parts(spec)) {
    rate_sum += cp->lambda;
    weighted_t0 += cp->lambda * cp->t0;
  }
  RteResult r;
  r.rho = rho;
  r.reliable_until = (-std::log(rho) + weighted_t0) / rate_sum;
  r.method = "series-closed-form";
  return r;
}

RteResult rte_identical_closed(double rho, double lambda, double t0) {
  RteResult r;
  r.rho = rho;
  r.reliable_until = t0 - std::log(rho) / lambda;
  r.method = "parallel-identical";
  return r;
}

RteResult rte_numeric(const SystemSpec& spec, double rho,
                      std::optional<QuadraticRteRoots> detail = std::nullopt) {
  const double horizon = integration_horizon(spec);
  RteResult r;
  r.rho = rho;
  r.method = "numeric-bisection";
  r.quadratic_detail = std::move(detail);
  if (survival(spec, horizon) >= rho) {
    r.reliable_until = horizon;
    return r;
  }
  r.reliable_until = numeric::bisect_last_true(
      [&](double t) { return survival(spec, t) >= rho; }, 0.0, horizon,
      kRteTimeTol);
  return r;
}

RteResult rte_quadratic_or_numeric(const SystemSpec& spec, double rho) {
  const auto p = parallel_parts(spec);
  QuadraticRteRoots roots = quadratic_rte_roots(p.weights, p.lambdas, p.t0s, rho);
  if (!roots.t2) {
    return rte_numeric(spec, rho, roots);  // Q < 0: the quadratic never reaches rho
  }
  RteResult r;
  r.rho = rho;
  r.reliable_until = *roots.t2;
  r.method = "parallel-quadratic";
  r.quadratic_detail = roots;
  return r;
}

bool parallel_identical(const ParallelParts& p) {
  for (std::size_t i = 1; i < p.lambdas.size(); ++i) {
    if (p.lambdas[i] != p.lambdas[0] || p.t0s[i] != p.t0s[0]) return false;
  }
  return true;
}

}  // namespace

RteResult rte(const SystemSpec& spec, double rho, RteMethod method) {
  check_rho(rho);
  const Shape shape = detect_shape(spec);
  switch (method) {
    case RteMethod::auto_pick:
      if (shape == Shape::flat_series) return rte_series_closed(spec, rho);
      if (shape == Shape::flat_parallel) {
        const auto p = parallel_parts(spec);
        if (parallel_identical(p)) {
          return rte_identical_closed(rho, p.lambdas[0], p.t0s[0]);
        }
        return rte_quadratic_or_numeric(spec, rho);
      }
      return rte_numeric(spec, rho);
    case RteMethod::closed_form:
      if (shape == Shape::flat_series) return rte_series_closed(spec, rho);
      if (shape == Shape::flat_parallel) {
        const auto p = parallel_parts(spec);
        if (parallel_identical(p)) {
          return rte_identical_closed(rho, p.lambdas[0], p.t0s[0]);
        }
      }
      throw ShapeError(
          "closed-form rte needs a flat series or identical parallel branches");
    case RteMethod::quadratic:
      if (shape != Shape::flat_parallel) {
        throw ShapeError("quadratic rte needs a flat parallel shape");
      }
      return rte_quadratic_or_numeric(spec, rho);
    case RteMethod::numeric:
      return rte_numeric(spec, rho);
  }
  throw DomainError("unknown rte method");
}

}  // namespace relichoice::analysis
