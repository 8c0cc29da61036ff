#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relichoice/model.hpp"

namespace relichoice::analysis {

/// `paper` reproduces the flat-shape closed forms verbatim; `numeric`
/// integrates the clamped survival function, which stays self-consistent on
/// every topology. Reports always name the mode actually used.
enum class Mode { numeric, paper };

enum class Shape { flat_series, flat_parallel, nested };

enum class RteMethod { auto_pick, closed_form, quadratic, numeric };

const char* to_string(Mode m);
const char* to_string(Shape s);
std::optional<Mode> mode_from_string(const std::string& s);
std::optional<RteMethod> rte_method_from_string(const std::string& s);

/// flat-series: a bare component or a series of components; flat-parallel: a
/// probabilistic choice over single components; anything else nested.
Shape detect_shape(const model::SystemSpec& spec);

/// Time-independent success probability: leaves look up probs, series
/// multiplies, choices mix by weight. Throws DomainError when a leaf has no
/// probability or a probability falls outside [0, 1].
double success_probability(const model::SystemExpr& expr,
                           const std::map<std::string, double>& probs);

/// Same, using each component's static p field.
double success_probability(const model::SystemSpec& spec);

/// Derives selection weights from per-path success probabilities using
/// normalized odds p/(1-p). Any path with p = 1 takes the whole mass (split
/// uniformly among such paths); p = 0 gets weight 0. Throws DomainError when
/// every p is 0 (no viable path).
model::WeightVector assign_weights(const std::vector<double>& probs);

/// System survival probability at time t. Component survival is
/// exp(-lambda*(t - t0)), clamped to 1 before the installation time; the
/// tree composes like success_probability. Non-increasing in t, equal to 1 on
/// [0, min t0].
double survival(const model::SystemSpec& spec, double t);

/// Failure-time density. Flat series and flat parallel use their closed
/// forms (valid from max t0 onward); nested shapes differentiate the clamped
/// survival numerically.
double pdf(const model::SystemSpec& spec, double t);

/// Equivalent hazard rate -P'(t)/P(t). Flat series: sum of rates, constant.
/// Flat parallel: mean of component rates weighted by w_k * component
/// survival. Nested: finite differences. Requires t >= max t0.
double sfr(const model::SystemSpec& spec, double t);

/// Mean time to failure. Paper mode: 1/sum(lambda) for series, sum(w/lambda)
/// for parallel; throws ShapeError on nested shapes. Numeric mode: integral
/// of clamped survival up to the adaptive horizon.
double mttf(const model::SystemSpec& spec, Mode mode);

/// Mean time between failures. Paper mode: T0 + 1/sum(lambda) for a
/// common-t0 series, sum(w*(t0 + 1/lambda)) for parallel; ShapeError
/// otherwise. Numeric mode: expectation of the failure-time density.
double mtbf(const model::SystemSpec& spec, Mode mode);

/// mtbf - mtbf-consistent mttf, floored at 0. For flat shapes in paper mode
/// this equals T0 (series) or sum(w*t0) (parallel) exactly.
double mttr(const model::SystemSpec& spec, Mode mode);

/// Upper integration limit: the point where survival drops below 1e-16,
/// found by doubling, capped at max t0 + 60/min(lambda).
double integration_horizon(const model::SystemSpec& spec);

/// Quadratic-in-t approximation of the time where a flat parallel system's
/// survival crosses rho. Q is the discriminant; when Q >= 0 the roots satisfy
/// t2 <= t1 and t2 is the usable bound (t1 is where the upward parabola
/// re-crosses rho, an artifact). Q < 0 means the truncated quadratic never
/// reaches rho; no roots are reported.
struct QuadraticRteRoots {
  double Q = 0.0;
  std::optional<double> t1;
  std::optional<double> t2;
};

QuadraticRteRoots quadratic_rte_roots(const model::WeightVector& weights,
                                      const std::vector<double>& lambdas,
                                      const std::vector<double>& t0s,
                                      double rho);

/// method strings: "series-closed-form", "parallel-identical",
/// "parallel-quadratic", "numeric-bisection".
struct RteResult {
  double rho = 0.0;
  double reliable_until = 0.0;
  std::string method;
  std::optional<QuadraticRteRoots> quadratic_detail;
};

/// Latest time the system stays at least rho-reliable, rho in (0, 1].
/// auto_pick routes series to the closed bound, identical-parameter parallel
/// to its closed bound, general flat parallel to the quadratic (bisection
/// when Q < 0), and nested shapes to bisection. Forcing closed_form or
/// quadratic on an unsupported shape throws ShapeError.
RteResult rte(const model::SystemSpec& spec, double rho,
              RteMethod method = RteMethod::auto_pick);

struct AnalyzeOptions {
  Mode mode = Mode::numeric;
  double rho = 0.9;
  RteMethod rte_method = RteMethod::auto_pick;
  std::vector<double> sfr_at;  // empty: evaluate at max t0
  std::vector<double> pdf_at;  // empty: same times as sfr_at
};

struct AnalysisReport {
  Shape shape = Shape::nested;
  Mode mode = Mode::numeric;  // mode the numbers actually come from
  double mttf = 0.0;
  double mtbf = 0.0;
  double mttr = 0.0;
  std::vector<std::pair<double, double>> sfr_at;  // (t, lambda_eq)
  std::vector<std::pair<double, double>> pdf_at;  // (t, density)
  RteResult rte;
  std::vector<std::string> notes;  // text output only
};

/// Computes every degradation parameter in one pass. When paper mode lacks a
/// closed form for the shape (nested, or series without a common t0) the
/// whole report falls back to numeric mode and says so in notes.
AnalysisReport analyze(const model::SystemSpec& spec,
                       const AnalyzeOptions& opts = {});

/// Report JSON: {"shape", "mode", "mttf", "mtbf", "mttr",
/// "sfr": [{"t", "lambda_eq"}], "rte": {"rho", "reliable_until", "method",
/// "quadratic": {"Q", "t1", "t2"}?}, "pdf": [{"t", "f"}]}. No other keys.
std::string report_json(const AnalysisReport& report);

/// Human-readable table, including notes.
std::string report_text(const AnalysisReport& report, const std::string& name);

/// CSV with header "T,value", steps rows, T evenly spaced on [from, to].
/// quantity is one of survival | pdf | sfr. Throws DomainError for steps < 2,
/// from >= to, or an sfr request starting before max t0.
std::string curve_csv(const model::SystemSpec& spec, const std::string& quantity,
                      double from, double to, std::size_t steps);

}  // namespace relichoice::analysis
