/* relichoice: degradation analysis of series-parallel systems whose parallel
 * paths are selected with fixed, unequal probabilities.
 *
 * All functions return rc_status. On failure, rc_last_error_message() holds a
 * thread-local description and, for text-parse failures,
 * rc_last_error_span() the offending source location. Strings returned
 * through char** out-parameters are heap-allocated; release them with
 * rc_string_free().
 */
#ifndef RELICHOICE_H
#define RELICHOICE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RC_API __declspec(dllexport)
#else
#define RC_API __attribute__((visibility("default")))
#endif

typedef enum rc_status {
  RC_OK = 0,
  RC_ERR_PARSE = 1,    /* text or schema error in the input document */
  RC_ERR_DOMAIN = 2,   /* bad argument value or unsupported shape */
  RC_ERR_IO = 3,       /* unreadable file */
  RC_ERR_INVALID = 4,  /* null pointer or malformed call */
  RC_ERR_INTERNAL = 5
} rc_status;

/* Opaque, immutable system handle. Construction validates; a handle always
 * refers to a canonical, analyzable system. Safe to share across threads. */
typedef struct rc_system rc_system;

typedef struct rc_estimate {
  double value;
  double std_error;
  uint64_t trials;
  uint64_t seed;
} rc_estimate;

/* Analysis options. mode: "numeric" (default when NULL) or "paper".
 * rte_method: "auto" (default), "closed-form", "quadratic", or "numeric".
 * rho <= 0 selects the default 0.9. sfr_times NULL evaluates at the largest
 * installation time; pdf_times NULL reuses the sfr times. */
typedef struct rc_analyze_opts {
  const char* mode;
  double rho;
  const char* rte_method;
  const double* sfr_times;
  size_t sfr_times_len;
  const double* pdf_times;
  size_t pdf_times_len;
} rc_analyze_opts;

RC_API const char* rc_version(void);

/* Construction. from_text parses the DSL grammar, from_json the structured
 * document, from_file dispatches on the ".json" extension. */
RC_API rc_status rc_system_from_text(const char* text, rc_system** out);
RC_API rc_status rc_system_from_json(const char* json_text, rc_system** out);
RC_API rc_status rc_system_from_file(const char* path, rc_system** out);
RC_API void rc_system_free(rc_system* sys);

/* Thread-local error state for the last failing call on this thread. */
RC_API const char* rc_last_error_message(void);
/* Returns 1 and fills the out-parameters when the last error carried a text
 * span (1-based line/column), else 0. */
RC_API int rc_last_error_span(int* line, int* column, int* length);

RC_API rc_status rc_system_name(const rc_system* sys, char** out);
/* "flat-series", "flat-parallel", or "nested". */
RC_API rc_status rc_system_shape(const rc_system* sys, char** out);
/* DSL text; parsing it back yields a structurally equal system. */
RC_API rc_status rc_system_to_text(const rc_system* sys, char** out);
RC_API rc_status rc_system_to_json(const rc_system* sys, char** out);
RC_API void rc_string_free(char* s);

/* Structural (time-independent) success probability from the components'
 * static p values. */
RC_API rc_status rc_static_success_probability(const rc_system* sys, double* out);
/* Selection weights from per-path success probabilities via normalized odds.
 * out_weights must hold n doubles. */
RC_API rc_status rc_assign_weights(const double* probs, size_t n,
                                   double* out_weights);

RC_API rc_status rc_survival(const rc_system* sys, double t, double* out);
RC_API rc_status rc_pdf(const rc_system* sys, double t, double* out);
RC_API rc_status rc_sfr(const rc_system* sys, double t, double* out);
/* mode: "paper" or "numeric". Paper mode fails with RC_ERR_DOMAIN on shapes
 * its closed forms do not cover. */
RC_API rc_status rc_mttf(const rc_system* sys, const char* mode, double* out);
RC_API rc_status rc_mtbf(const rc_system* sys, const char* mode, double* out);
RC_API rc_status rc_mttr(const rc_system* sys, const char* mode, double* out);
/* method as in rc_analyze_opts.rte_method; NULL means "auto". */
RC_API rc_status rc_rte(const rc_system* sys, double rho, const char* method,
                        double* out_reliable_until);
RC_API rc_status rc_integration_horizon(const rc_system* sys, double* out);

/* Full report. opts may be NULL for defaults. */
RC_API rc_status rc_analyze_json(const rc_system* sys,
                                 const rc_analyze_opts* opts, char** out);
RC_API rc_status rc_analyze_text(const rc_system* sys,
                                 const rc_analyze_opts* opts, char** out);
/* CSV "T,value" over [from, to]; quantity: survival | pdf | sfr. */
RC_API rc_status rc_curve_csv(const rc_system* sys, const char* quantity,
                              double from, double to, size_t steps, char** out);

/* Simulation. lanes: 0 picks the hardware thread count, 1 runs serially, n
 * uses n workers; results are bit-identical for every lanes value. */
RC_API rc_status rc_estimate_survival(const rc_system* sys, double t,
                                      uint64_t trials, uint64_t seed, int lanes,
                                      rc_estimate* out);
RC_API rc_status rc_estimate_mttf(const rc_system* sys, uint64_t trials,
                                  uint64_t seed, int lanes, rc_estimate* out);
RC_API rc_status rc_sample_failure_time(const rc_system* sys,
                                        uint64_t trial_index, uint64_t seed,
                                        double* out);

/* Analytic-vs-simulation check: survival at five quantile times plus mttf.
 * Sets *out_pass to 1 when every non-divergence row is within
 * tolerance_sigmas standard errors. mode NULL means "numeric". */
RC_API rc_status rc_compare_text(const rc_system* sys, const char* mode,
                                 uint64_t trials, uint64_t seed,
                                 double tolerance_sigmas, int lanes,
                                 int* out_pass, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* RELICHOICE_H */
