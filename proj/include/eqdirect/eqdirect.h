/*
 * C interface to the eqdirect solver library.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions return EQD_OK on success; on failure they return an error code
 * and eqd_last_error() describes the problem (thread-local, valid until the
 * next failing call on the same thread).
 */
#ifndef EQDIRECT_EQDIRECT_H
#define EQDIRECT_EQDIRECT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EQDIRECT_BUILDING)
#    define EQD_API __declspec(dllexport)
#  else
#    define EQD_API __declspec(dllimport)
#  endif
#else
#  define EQD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eqd_status {
  EQD_OK = 0,
  EQD_ERR_USAGE = 1,     /* invalid argument or dimension mismatch */
  EQD_ERR_PARSE = 2,     /* malformed problem or records file */
  EQD_ERR_INVARIANT = 3, /* data violates a problem invariant */
  EQD_ERR_NUMERIC = 4,   /* inner solver failure */
  EQD_ERR_IO = 5,
  EQD_ERR_INTERNAL = 6
} eqd_status;

typedef enum eqd_problem_class {
  EQD_AFFINE_VI = 0,
  EQD_TRIG_VI = 1,
  EQD_AFFINE_EP = 2
} eqd_problem_class;

typedef enum eqd_algorithm { EQD_ALGO_DIRECT = 0, EQD_ALGO_LDIRECT = 1 } eqd_algorithm;

typedef enum eqd_profile_kind { EQD_PROFILE_PERF = 0, EQD_PROFILE_DATA = 1 } eqd_profile_kind;

typedef struct eqd_problem eqd_problem;
typedef struct eqd_result eqd_result;

EQD_API const char* eqd_version(void);
EQD_API const char* eqd_last_error(void);
/* Non-fatal diagnostic from the last call that produced one (or ""). */
EQD_API const char* eqd_last_warning(void);

/* Problems */
EQD_API eqd_status eqd_problem_load(const char* path, eqd_problem** out);
EQD_API eqd_status eqd_problem_save(const eqd_problem* p, const char* path);
EQD_API eqd_status eqd_problem_generate(eqd_problem_class cls, int n, uint64_t seed, uint64_t index,
                                        eqd_problem** out);
EQD_API void eqd_problem_free(eqd_problem* p);
EQD_API int eqd_problem_dim(const eqd_problem* p);
EQD_API const char* eqd_problem_id(const eqd_problem* p);
EQD_API eqd_problem_class eqd_problem_get_class(const eqd_problem* p);

/* Gap function and Lipschitz bounds; vectors have eqd_problem_dim entries. */
EQD_API eqd_status eqd_gap_value(const eqd_problem* p, const double* x, double alpha, double* value,
                                 double* maximizer /* nullable */);
EQD_API eqd_status eqd_gap_gradient(const eqd_problem* p, const double* x, double alpha, double* grad);
EQD_API eqd_status eqd_lipschitz_bound(const eqd_problem* p, const double* box_lower, const double* box_upper,
                                       double alpha, double* chosen);

/* Solve */
typedef struct eqd_solve_options {
  eqd_algorithm algorithm;
  double alpha;
  int64_t global_budget;
  int64_t local_budget;
  double eps;
  double eta;
  const char* lbar; /* "analytic", "constant:<v>", "slope:<f>"; NULL = analytic */
  int starts;
} eqd_solve_options;

EQD_API void eqd_solve_options_init(eqd_solve_options* opts);
EQD_API eqd_status eqd_solve(const eqd_problem* p, const eqd_solve_options* opts, eqd_result** out);
EQD_API void eqd_result_free(eqd_result* r);
EQD_API double eqd_result_best_phi(const eqd_result* r);
EQD_API int64_t eqd_result_evals_used(const eqd_result* r);
/* Returns 1 and sets *bound if a gap certificate is available, else 0. */
EQD_API int eqd_result_gap_bound(const eqd_result* r, double* bound);
/* Copies best x into `x` (eqd_problem_dim entries). */
EQD_API void eqd_result_best_x(const eqd_result* r, double* x);
EQD_API size_t eqd_result_history_size(const eqd_result* r);
EQD_API void eqd_result_history_at(const eqd_result* r, size_t i, int64_t* eval_count, double* best_phi);
/* Gates: out[i] = first evaluation count with best phi <= gates[i], or -1. */
EQD_API void eqd_result_evals_to_gaps(const eqd_result* r, const double* gates, size_t n_gates, int64_t* out);
EQD_API eqd_status eqd_result_write_trace(const eqd_result* r, const char* path);
EQD_API eqd_status eqd_result_write_history(const eqd_result* r, const char* path);
/* CSV header / summary row; returned strings live as long as the result. */
EQD_API const char* eqd_result_summary_header(const eqd_result* r);
EQD_API const char* eqd_result_summary_row(const eqd_result* r);

/* Suites and benchmarks */
EQD_API eqd_status eqd_generate_suite(eqd_problem_class cls, int n, int count, uint64_t seed, const char* out_dir);

typedef struct eqd_bench_options {
  const char* algorithms; /* comma separated, e.g. "direct,ldirect" */
  double alpha;
  int64_t global_budget;
  int64_t local_budget;
  double eps;
  double eta;
  const char* lbar;
  double tau;
  const char* gates; /* comma separated, e.g. "1e-1,1e-3,1e-5" */
  unsigned threads;  /* 0 = hardware concurrency */
} eqd_bench_options;

EQD_API void eqd_bench_options_init(eqd_bench_options* opts);
/* Writes records.csv, histories.csv, gate_table.csv, gate_table.txt,
 * perf_profile.csv and data_profile.csv into out_dir. */
EQD_API eqd_status eqd_bench_run(const char* suite_dir, const eqd_bench_options* opts, const char* out_dir);
EQD_API eqd_status eqd_profile(const char* records_csv, eqd_profile_kind kind, double tau, const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* EQDIRECT_EQDIRECT_H */
