#include "relichoice.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "relichoice/analysis.hpp"
#include "relichoice/dsl.hpp"
#include "relichoice/model.hpp"
#include "relichoice/montecarlo.hpp"

struct rc_system {
  relichoice::model::SystemSpec spec;
};

namespace {

using namespace relichoice;

struct ErrorState {
  std::string message;
  bool has_span = false;
  SourceSpan span;
};

thread_local ErrorState g_error;

void clear_error() {
  g_error.message.clear();
  g_error.has_span = false;
}

rc_status set_error(rc_status status, const std::string& msg) {
  g_error.message = msg;
  g_error.has_span = false;
  return status;
}

rc_status set_parse_error(const ParseError& e) {
  g_error.message = e.what();
  g_error.has_span = true;
  g_error.span = e.span();
  return RC_ERR_PARSE;
}

template <class Fn>
rc_status guarded(Fn&& fn) {
  clear_error();
  try {
    fn();
    return RC_OK;
  } catch (const ParseError& e) {
    return set_parse_error(e);
  } catch (const SchemaError& e) {
    return set_error(RC_ERR_PARSE, e.what());
  } catch (const IoError& e) {
    return set_error(RC_ERR_IO, e.what());
  } catch (const DomainError& e) {
    return set_error(RC_ERR_DOMAIN, e.what());
  } catch (const std::exception& e) {
    return set_error(RC_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(RC_ERR_INTERNAL, "unknown error");
  }
}

rc_status invalid(const char* what) {
  return set_error(RC_ERR_INVALID, std::string("invalid argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

analysis::Mode parse_mode(const char* mode) {
  if (!mode || !*mode) return analysis::Mode::numeric;
  if (auto m = analysis::mode_from_string(mode)) return *m;
  throw DomainError(std::string("unknown mode '") + mode +
                    "' (expected numeric or paper)");
}

analysis::RteMethod parse_rte_method(const char* method) {
  if (!method || !*method) return analysis::RteMethod::auto_pick;
  if (auto m = analysis::rte_method_from_string(method)) return *m;
  throw DomainError(std::string("unknown rte method '") + method +
                    "' (expected auto, closed-form, quadratic, or numeric)");
}

analysis::AnalyzeOptions build_options(const rc_analyze_opts* opts) {
  analysis::AnalyzeOptions o;
  if (!opts) return o;
  o.mode = parse_mode(opts->mode);
  if (opts->rho > 0.0) o.rho = opts->rho;
  o.rte_method = parse_rte_method(opts->rte_method);
  if (opts->sfr_times && opts->sfr_times_len) {
    o.sfr_at.assign(opts->sfr_times, opts->sfr_times + opts->sfr_times_len);
  }
  if (opts->pdf_times && opts->pdf_times_len) {
    o.pdf_at.assign(opts->pdf_times, opts->pdf_times + opts->pdf_times_len);
  }
  return o;
}

montecarlo::SimulationConfig sim_config(uint64_t trials, uint64_t seed,
                                        int lanes) {
  montecarlo::SimulationConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.parallel_ok = lanes != 1;
  cfg.lanes = lanes;
  return cfg;
}

rc_status make_system(rc_system** out, model::SystemSpec spec) {
  *out = new rc_system{std::move(spec)};
  return RC_OK;
}

}  // namespace

extern "C" {

const char* rc_version(void) { return "1.0.0"; }

rc_status rc_system_from_text(const char* text, rc_system** out) {
  if (!text || !out) return invalid("text and out must be non-null");
  *out = nullptr;
  return guarded([&] { make_system(out, dsl::parse(text)); });
}

rc_status rc_system_from_json(const char* json_text, rc_system** out) {
  if (!json_text || !out) return invalid("json_text and out must be non-null");
  *out = nullptr;
  return guarded([&] { make_system(out, dsl::from_json(json_text)); });
}

rc_status rc_system_from_file(const char* path, rc_system** out) {
  if (!path || !out) return invalid("path and out must be non-null");
  *out = nullptr;
  return guarded([&] { make_system(out, dsl::load_file(path)); });
}

void rc_system_free(rc_system* sys) { delete sys; }

const char* rc_last_error_message(void) { return g_error.message.c_str(); }

int rc_last_error_span(int* line, int* column, int* length) {
  if (!g_error.has_span) return 0;
  if (line) *line = g_error.span.line;
  if (column) *column = g_error.span.column;
  if (length) *length = g_error.span.length;
  return 1;
}

rc_status rc_system_name(const rc_system* sys, char** out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = dup_string(sys->spec.name); });
}

rc_status rc_system_shape(const rc_system* sys, char** out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded(
      [&] { *out = dup_string(analysis::to_string(analysis::detect_shape(sys->spec))); });
}

rc_status rc_system_to_text(const rc_system* sys, char** out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = dup_string(dsl::format(sys->spec)); });
}

rc_status rc_system_to_json(const rc_system* sys, char** out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = dup_string(dsl::to_json(sys->spec)); });
}

void rc_string_free(char* s) { std::free(s); }

rc_status rc_static_success_probability(const rc_system* sys, double* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = analysis::success_probability(sys->spec); });
}

rc_status rc_assign_weights(const double* probs, size_t n, double* out_weights) {
  if (!probs || !out_weights) return invalid("probs and out_weights must be non-null");
  return guarded([&] {
    const auto w = analysis::assign_weights(std::vector<double>(probs, probs + n));
    std::memcpy(out_weights, w.data(), w.size() * sizeof(double));
  });
}

rc_status rc_survival(const rc_system* sys, double t, double* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = analysis::survival(sys->spec, t); });
}

rc_status rc_pdf(const rc_system* sys, double t, double* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = analysis::pdf(sys->spec, t); });
}

rc_status rc_sfr(const rc_system* sys, double t, double* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = analysis::sfr(sys->spec, t); });
}

rc_status rc_mttf(const rc_system* sys, const char* mode, double* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = analysis::mttf(sys->spec, parse_mode(mode)); });
}

rc_status rc_mtbf(const rc_system* sys, const char* mode, double* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = analysis::mtbf(sys->spec, parse_mode(mode)); });
}

rc_status rc_mttr(const rc_system* sys, const char* mode, double* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = analysis::mttr(sys->spec, parse_mode(mode)); });
}

rc_status rc_rte(const rc_system* sys, double rho, const char* method,
                 double* out_reliable_until) {
  if (!sys || !out_reliable_until) return invalid("sys and out must be non-null");
  return guarded([&] {
    *out_reliable_until =
        analysis::rte(sys->spec, rho, parse_rte_method(method)).reliable_until;
  });
}

rc_status rc_integration_horizon(const rc_system* sys, double* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] { *out = analysis::integration_horizon(sys->spec); });
}

rc_status rc_analyze_json(const rc_system* sys, const rc_analyze_opts* opts,
                          char** out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] {
    *out = dup_string(
        analysis::report_json(analysis::analyze(sys->spec, build_options(opts))));
  });
}

rc_status rc_analyze_text(const rc_system* sys, const rc_analyze_opts* opts,
                          char** out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] {
    *out = dup_string(analysis::report_text(
        analysis::analyze(sys->spec, build_options(opts)), sys->spec.name));
  });
}

rc_status rc_curve_csv(const rc_system* sys, const char* quantity, double from,
                       double to, size_t steps, char** out) {
  if (!sys || !quantity || !out) {
    return invalid("sys, quantity, and out must be non-null");
  }
  return guarded([&] {
    *out = dup_string(analysis::curve_csv(sys->spec, quantity, from, to, steps));
  });
}

rc_status rc_estimate_survival(const rc_system* sys, double t, uint64_t trials,
                               uint64_t seed, int lanes, rc_estimate* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] {
    const auto est = montecarlo::estimate_survival(
        sys->spec, t, sim_config(trials, seed, lanes));
    *out = {est.value, est.std_error, est.trials, est.seed};
  });
}

rc_status rc_estimate_mttf(const rc_system* sys, uint64_t trials, uint64_t seed,
                           int lanes, rc_estimate* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] {
    const auto est =
        montecarlo::estimate_mttf(sys->spec, sim_config(trials, seed, lanes));
    *out = {est.value, est.std_error, est.trials, est.seed};
  });
}

rc_status rc_sample_failure_time(const rc_system* sys, uint64_t trial_index,
                                 uint64_t seed, double* out) {
  if (!sys || !out) return invalid("sys and out must be non-null");
  return guarded([&] {
    montecarlo::SimulationConfig cfg;
    cfg.seed = seed;
    *out = montecarlo::sample_failure_time(sys->spec, trial_index, cfg);
  });
}

rc_status rc_compare_text(const rc_system* sys, const char* mode,
                          uint64_t trials, uint64_t seed,
                          double tolerance_sigmas, int lanes, int* out_pass,
                          char** out_text) {
  if (!sys || !out_pass || !out_text) {
    return invalid("sys, out_pass, and out_text must be non-null");
  }
  return guarded([&] {
    const auto report =
        montecarlo::compare(sys->spec, parse_mode(mode),
                            sim_config(trials, seed, lanes), tolerance_sigmas);
    *out_pass = report.pass ? 1 : 0;
    *out_text = dup_string(report.text);
  });
}

}  // extern "C"
