#ifndef IOPEG_IOPEG_H
#define IOPEG_IOPEG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IOPEG_API __declspec(dllexport)
#else
#define IOPEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum iopeg_status {
  IOPEG_OK = 0,
  IOPEG_INVALID_ARGUMENT = 1,
  IOPEG_DEGENERATE_CELL = 2,
  IOPEG_NOT_SPD = 3,
  IOPEG_NOT_SYMMETRIC = 4,
  IOPEG_DIMENSION_MISMATCH = 5,
  IOPEG_BREAKDOWN = 6,
  IOPEG_NOT_CONVERGED = 7,
  IOPEG_IO = 8,
  IOPEG_INTERNAL = 9
} iopeg_status;

typedef enum iopeg_precond {
  IOPEG_PRECOND_EXACT_BLOCK = 0,
  IOPEG_PRECOND_JACOBI = 1,
  IOPEG_PRECOND_NONE = 2
} iopeg_precond;

typedef enum iopeg_study_kind {
  IOPEG_STUDY_CONVERGENCE = 0,
  IOPEG_STUDY_PRECOND = 1,
  IOPEG_STUDY_GAMMA_SWEEP = 2,
  IOPEG_STUDY_ALPHA_SWEEP = 3,
  IOPEG_STUDY_SINGLE = 4
} iopeg_study_kind;

typedef enum iopeg_eigen_method {
  IOPEG_EIGEN_AUTO = 0,
  IOPEG_EIGEN_DENSE = 1,
  IOPEG_EIGEN_LANCZOS = 2
} iopeg_eigen_method;

typedef struct iopeg_mesh iopeg_mesh;
typedef struct iopeg_run iopeg_run;
typedef struct iopeg_study iopeg_study;

/* Message of the most recent failure on the calling thread ("" if none). */
IOPEG_API const char* iopeg_last_error(void);
IOPEG_API const char* iopeg_version(void);
IOPEG_API const char* iopeg_status_string(iopeg_status status);

/* ---- mesh ---------------------------------------------------------------- */

/* Structured n x n mesh of the unit square, every square cut along its
   lower-left to upper-right diagonal. */
IOPEG_API iopeg_status iopeg_mesh_create(int64_t n, iopeg_mesh** out);
IOPEG_API void iopeg_mesh_destroy(iopeg_mesh* mesh);
IOPEG_API iopeg_status iopeg_mesh_counts(const iopeg_mesh* mesh, int64_t* vertices,
                                         int64_t* cells, int64_t* facets,
                                         int64_t* boundary_facets);
IOPEG_API iopeg_status iopeg_mesh_h_max(const iopeg_mesh* mesh, double* h_max);

/* ---- single manufactured-solution solve -------------------------------- */

typedef struct iopeg_run_config {
  int64_t n;
  int k;
  double kappa0;
  double gamma_int;
  double gamma_bdy;
  double alpha;
  double tol;
  int64_t max_iters;
  iopeg_precond precond;
} iopeg_run_config;

typedef struct iopeg_error_report {
  double l2_error;
  double ah_error;
  double flux_error;
  double conservation_residual;
  double interior_jump_seminorm;
} iopeg_error_report;

/* n = 8, k = 1, kappa0 = 1, gamma 10/10, alpha = 1, tol = 1e-12,
   max_iters = 10000, exact block preconditioner. */
IOPEG_API void iopeg_run_config_default(iopeg_run_config* config);

/* Runs mesh, assembly, MINRES, flux recovery and error evaluation. A solve
   that hits max_iters still yields a handle; check iopeg_run_solve_info. */
IOPEG_API iopeg_status iopeg_run_solve(const iopeg_run_config* config, iopeg_run** out);
IOPEG_API void iopeg_run_destroy(iopeg_run* run);
IOPEG_API iopeg_status iopeg_run_errors(const iopeg_run* run, iopeg_error_report* out);
IOPEG_API iopeg_status iopeg_run_solve_info(const iopeg_run* run, int64_t* iterations,
                                            int* converged, double* relative_residual);
/* Copies up to `capacity` coefficients; `*length` receives the full size.
   Pass buffer = NULL to query the size. */
IOPEG_API iopeg_status iopeg_run_solution(const iopeg_run* run, double* buffer,
                                          size_t capacity, size_t* length);
IOPEG_API iopeg_status iopeg_run_residual_history(const iopeg_run* run, double* buffer,
                                                  size_t capacity, size_t* length);

/* Extreme eigenvalues of the product-space matrix against its block
   diagonal, on the complement of the kernel. */
IOPEG_API iopeg_status iopeg_spectral_bounds(const iopeg_run_config* config,
                                             iopeg_eigen_method method, double* lambda_min,
                                             double* lambda_max);

/* ---- studies ------------------------------------------------------------ */

typedef struct iopeg_study_config {
  iopeg_study_kind study;
  const int64_t* n_list;
  size_t n_count;
  int k;
  double alpha;
  double gamma_int;
  double gamma_bdy;
  const double* kappa0_list;
  size_t kappa0_count;
  const double* alpha_list; /* alpha sweep only; NULL keeps the default list */
  size_t alpha_count;
  double tol;
  int64_t max_iters;
  iopeg_precond precond;
} iopeg_study_config;

typedef struct iopeg_study_row {
  double kappa0;
  int k;
  int64_t n;
  double h_max;
  double l2_error;
  double l2_rate;
  double ah_error;
  double ah_rate;
  double flux_error;
  double flux_rate;
  int has_rates; /* 0 for the first n of each sweep block */
  double cons_residual;
  int64_t iterations;
  int converged;
  double alpha;
  double gamma_int;
  double gamma_bdy;
} iopeg_study_row;

/* Convergence study with n = 4..128 and kappa0 = 1; list pointers are NULL
   meaning "use the defaults". */
IOPEG_API void iopeg_study_config_default(iopeg_study_config* config);
IOPEG_API iopeg_status iopeg_study_run(const iopeg_study_config* config, iopeg_study** out);
/* Loads rows written by iopeg_study_write_csv. */
IOPEG_API iopeg_status iopeg_study_read_csv(const char* path, iopeg_study** out);
IOPEG_API void iopeg_study_destroy(iopeg_study* study);
IOPEG_API size_t iopeg_study_row_count(const iopeg_study* study);
IOPEG_API iopeg_status iopeg_study_row_at(const iopeg_study* study, size_t index,
                                          iopeg_study_row* out);
IOPEG_API iopeg_status iopeg_study_write_csv(const iopeg_study* study, const char* path);
/* Human-readable table; same buffer protocol as iopeg_run_solution, with
   `*length` counting the terminating NUL. */
IOPEG_API iopeg_status iopeg_study_format_table(const iopeg_study* study, char* buffer,
                                                size_t capacity, size_t* length);

IOPEG_API iopeg_status iopeg_parse_study_kind(const char* name, iopeg_study_kind* out);
IOPEG_API iopeg_status iopeg_parse_precond(const char* name, iopeg_precond* out);

#ifdef __cplusplus
}
#endif

#endif /* IOPEG_IOPEG_H */
