#ifndef MAVD_MAVD_H
#define MAVD_MAVD_H

/* C interface to the mavd simulator and certificate checker. All handles are
 * opaque; every call returns a mavd_status and the message of the most recent
 * failure on the calling thread is available from mavd_last_error(). */

#include <stddef.h>

#if defined(MAVD_BUILDING_LIBRARY)
#define MAVD_API __attribute__((visibility("default")))
#else
#define MAVD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mavd_status {
  MAVD_OK = 0,
  MAVD_ERR_INVALID_ARGUMENT,
  MAVD_ERR_INDEX_OUT_OF_RANGE,
  MAVD_ERR_DOMAIN,
  MAVD_ERR_NUMERICAL_OVERFLOW,
  MAVD_ERR_CONVERGENCE,
  MAVD_ERR_UNSUPPORTED,
  MAVD_ERR_ASSUMPTION_VIOLATED,
  MAVD_ERR_CONFIG,
  MAVD_ERR_IO,
  MAVD_ERR_SCHEMA,
  MAVD_ERR_DIVERGED,
  MAVD_ERR_INTERNAL
} mavd_status;

typedef enum mavd_scheme {
  MAVD_SCHEME_SEMI_IMPLICIT = 0,
  MAVD_SCHEME_EXPLICIT_EULER = 1,
  MAVD_SCHEME_CENTRAL_DIFFERENCE = 2
} mavd_scheme;

typedef enum mavd_cert_status {
  MAVD_CERT_PASS = 0,
  MAVD_CERT_FAIL = 1,
  MAVD_CERT_NOT_APPLICABLE = 2
} mavd_cert_status;

typedef enum mavd_plot_kind {
  MAVD_PLOT_TRAJECTORY_2D = 0,
  MAVD_PLOT_U0_VS_BOUND_LOGLOG = 1
} mavd_plot_kind;

typedef struct mavd_problem mavd_problem;
typedef struct mavd_trajectory mavd_trajectory;

typedef struct mavd_integrator_config {
  double alpha;
  double t0;
  double h;
  long steps;
  mavd_scheme scheme;
  double v_tol;
  double tie_tol;
  double qp_tol;
} mavd_integrator_config;

typedef struct mavd_bound_summary {
  mavd_cert_status status;
  double u0_initial;
  double R;
  double constant;
  double worst_slack;
  long first_violation; /* -1 when none */
  size_t rows;
} mavd_bound_summary;

MAVD_API const char* mavd_version(void);
MAVD_API const char* mavd_status_string(mavd_status status);
/* Valid until the next failing call on the same thread. */
MAVD_API const char* mavd_last_error(void);

/* problems */
MAVD_API mavd_status mavd_problem_builtin(const char* name, mavd_problem** out);
MAVD_API mavd_status mavd_problem_from_config(const char* path, mavd_problem** out);
MAVD_API void mavd_problem_free(mavd_problem* problem);
MAVD_API mavd_status mavd_problem_dims(const mavd_problem* problem, size_t* dim, size_t* objectives);
MAVD_API mavd_status mavd_eval_objective(const mavd_problem* problem, size_t i, const double* x,
                                         double* value);
MAVD_API mavd_status mavd_eval_gradient(const mavd_problem* problem, size_t i, const double* x,
                                        double* grad);
MAVD_API mavd_status mavd_pareto_point(const mavd_problem* problem, double lambda, double* z);

/* hull geometry; gradients is column-major d x m, theta has m entries */
MAVD_API mavd_status mavd_min_norm_in_hull(const double* gradients, size_t d, size_t m, double tol,
                                           double* theta, double* g);

/* dynamics */
MAVD_API mavd_integrator_config mavd_integrator_defaults(void);
MAVD_API mavd_status mavd_integrate(const mavd_problem* problem, const double* x0,
                                    const mavd_integrator_config* cfg, mavd_trajectory** out);
MAVD_API void mavd_trajectory_free(mavd_trajectory* traj);
MAVD_API long mavd_trajectory_steps(const mavd_trajectory* traj);
/* Copies x^k and v^k (d entries each); either pointer may be NULL. */
MAVD_API mavd_status mavd_trajectory_state(const mavd_trajectory* traj, long k, double* t, double* x,
                                           double* v);
MAVD_API mavd_status mavd_write_trajectory_csv(const mavd_trajectory* traj, const char* path);

/* merit */
MAVD_API mavd_status mavd_eval_u0(const mavd_problem* problem, const double* x, double* u0);
MAVD_API mavd_status mavd_compute_R(const mavd_problem* problem, const double* x0, double* R);
/* cert_csv may be NULL; nothing is written for a not-applicable certificate. */
MAVD_API mavd_status mavd_certify_bound(const mavd_problem* problem, const mavd_trajectory* traj,
                                        long every, double eps, const char* cert_csv,
                                        mavd_bound_summary* out);

MAVD_API mavd_status mavd_emit_plot(const char* csv, mavd_plot_kind kind, const char* svg);

/* command entry points; return process exit codes 0/1/2 */
MAVD_API int mavd_cmd_run(const char* config_path);
MAVD_API int mavd_cmd_verify(const char* cert_path);
MAVD_API int mavd_cmd_reproduce(const char* out_dir /* may be NULL */);
MAVD_API int mavd_cmd_compare_schemes(const char* config_path);
MAVD_API int mavd_cmd_plot(const char* csv, const char* kind, const char* svg);

#ifdef __cplusplus
}
#endif

#endif /* MAVD_MAVD_H */
