#ifndef CLPM_CLPM_H
#define CLPM_CLPM_H

#include <stddef.h>
#include <stdint.h>

#if defined(CLPM_BUILDING_LIBRARY)
#define CLPM_API __attribute__((visibility("default")))
#else
#define CLPM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clpm_status {
  CLPM_OK = 0,
  CLPM_ERR_INVALID_ARGUMENT = 1,
  CLPM_ERR_DOMAIN = 2,
  CLPM_ERR_IO = 3,
  CLPM_ERR_PARSE = 4,
  CLPM_ERR_VARIANT_MISMATCH = 5,
  CLPM_ERR_NUMERIC = 6,
  CLPM_ERR_INTERNAL = 7
} clpm_status;

typedef enum clpm_variant { CLPM_PROJECTION = 0, CLPM_DISTANCE = 1 } clpm_variant;

typedef enum clpm_batch_mode { CLPM_FULL_BATCH = 0, CLPM_MINIBATCH = 1 } clpm_batch_mode;

typedef enum clpm_step_rule { CLPM_STEP_FIXED = 0, CLPM_STEP_ADAPTIVE = 1 } clpm_step_rule;

typedef struct clpm_events clpm_events;
typedef struct clpm_model clpm_model;
typedef struct clpm_trace clpm_trace;

/* Message for the last failing call on this thread ("" if none). */
CLPM_API const char* clpm_last_error(void);
CLPM_API const char* clpm_status_name(clpm_status status);
CLPM_API const char* clpm_version(void);

/* ---- events ---------------------------------------------------------- */

/* CSV `time,source,target`. horizon <= 0 means "largest event time". */
CLPM_API clpm_status clpm_events_read(const char* path, double horizon, clpm_events** out);
/* Reads events whose labels must all belong to `model`, keeping its ids. */
CLPM_API clpm_status clpm_events_read_for_model(const char* path, const clpm_model* model,
                                                clpm_events** out);
CLPM_API clpm_status clpm_events_write(const clpm_events* events, const char* path);
CLPM_API size_t clpm_events_count(const clpm_events* events);
CLPM_API size_t clpm_events_num_nodes(const clpm_events* events);
CLPM_API double clpm_events_horizon(const clpm_events* events);
CLPM_API clpm_status clpm_events_get(const clpm_events* events, size_t index, double* time,
                                     uint32_t* a, uint32_t* b);
CLPM_API void clpm_events_free(clpm_events* events);

/* ---- simulation ------------------------------------------------------ */

typedef struct clpm_scenario_options {
  const char* scenario; /* "sim1", "sim2" or "sim3" */
  uint64_t seed;
  size_t num_nodes;     /* sim2 / sim3; 0 keeps the default (20) */
  double beta;          /* sim3 intercept */
  double radius;        /* sim3 ring radius */
  double period;        /* sim3 round-trip duration */
} clpm_scenario_options;

CLPM_API void clpm_scenario_options_default(clpm_scenario_options* options);

/* `truth` (optional) receives the generating model for sim3 and NULL for
   the blockmodel scenarios. */
CLPM_API clpm_status clpm_simulate(const clpm_scenario_options* options, clpm_events** events,
                                   clpm_model** truth);
/* `segment_start,segment_end,node,cluster` for sim1 / sim2. */
CLPM_API clpm_status clpm_write_memberships(const clpm_scenario_options* options,
                                            const char* path);
/* Draw events from a model by thinning. */
CLPM_API clpm_status clpm_model_simulate(const clpm_model* model, uint64_t seed,
                                         clpm_events** out);

/* ---- models ---------------------------------------------------------- */

CLPM_API clpm_status clpm_model_read(const char* path, clpm_model** out);
CLPM_API clpm_status clpm_model_write(const clpm_model* model, const char* path);
CLPM_API void clpm_model_free(clpm_model* model);

CLPM_API clpm_variant clpm_model_variant(const clpm_model* model);
CLPM_API size_t clpm_model_num_nodes(const clpm_model* model);
CLPM_API size_t clpm_model_num_knots(const clpm_model* model);
CLPM_API size_t clpm_model_dim(const clpm_model* model);
CLPM_API double clpm_model_beta(const clpm_model* model);
CLPM_API double clpm_model_knot(const clpm_model* model, size_t k);
/* Label of node i, owned by the model. */
CLPM_API const char* clpm_model_label(const clpm_model* model, size_t i);
/* Interpolated position of node i at time t into out[0..dim). */
CLPM_API clpm_status clpm_model_position(const clpm_model* model, size_t i, double t,
                                         double* out);
CLPM_API clpm_status clpm_model_penalty(const clpm_model* model, double* sigma0_sq,
                                        double* sigma_sq, double* mu_angle);
CLPM_API clpm_status clpm_model_set_penalty(clpm_model* model, double sigma0_sq,
                                            double sigma_sq, double mu_angle);
CLPM_API clpm_status clpm_model_fit_info(const clpm_model* model, uint64_t* seed,
                                         size_t* iterations, double* final_objective,
                                         int* has_final_objective);

/* Random small model plus uniformly placed events, for gradient checks. */
CLPM_API clpm_status clpm_random_instance(clpm_variant variant, uint64_t seed,
                                          clpm_model** model, clpm_events** events);

/* `time,node,x,y[,...]` at each requested time. */
CLPM_API clpm_status clpm_model_write_snapshots(const clpm_model* model, const double* times,
                                                size_t count, const char* path);

/* ---- evaluation ------------------------------------------------------ */

typedef struct clpm_objective_parts {
  double event_term;
  double integral_term;
  double loglik;
  double penalty;
  double total;
  size_t floor_hits; /* projection events whose rate was floored inside log() */
} clpm_objective_parts;

CLPM_API clpm_status clpm_evaluate(const clpm_model* model, const clpm_events* events,
                                   clpm_objective_parts* out);

typedef struct clpm_gradcheck_report {
  double max_relative_error;
  size_t worst_index;
  double analytic;
  double numeric;
  size_t num_parameters;
} clpm_gradcheck_report;

CLPM_API clpm_status clpm_gradcheck(const clpm_model* model, const clpm_events* events,
                                    double h, clpm_gradcheck_report* out);

/* ---- fitting --------------------------------------------------------- */

typedef struct clpm_fit_options {
  clpm_variant variant;
  const double* knots;
  size_t num_knots;
  size_t dim;
  double sigma0_sq;
  double sigma_sq;
  double mu_angle;
  clpm_batch_mode mode;
  size_t batch_size; /* 0: max(1, N / 10) */
  clpm_step_rule step_rule;
  double step;
  double decay1;
  double decay2;
  double eps;
  size_t max_iters;
  uint64_t seed;
  double convergence_tol;
  size_t convergence_window;
  size_t trace_interval;
  double init_sd;
  int grad_check;
} clpm_fit_options;

CLPM_API void clpm_fit_options_default(clpm_fit_options* options);

/* `start` (optional) replaces the seeded initialization; it must match the
   variant, node count and knot count. `trace` is optional. */
CLPM_API clpm_status clpm_fit(const clpm_events* events, const clpm_fit_options* options,
                              const clpm_model* start, clpm_model** model, clpm_trace** trace);

CLPM_API size_t clpm_trace_size(const clpm_trace* trace);
CLPM_API clpm_status clpm_trace_get(const clpm_trace* trace, size_t index, size_t* iteration,
                                    double* objective);
CLPM_API int clpm_trace_converged(const clpm_trace* trace);
/* Gradient-check discrepancy measured at the start of the fit (NaN if not run). */
CLPM_API double clpm_trace_grad_check(const clpm_trace* trace);
CLPM_API clpm_status clpm_trace_write(const clpm_trace* trace, const char* path);
CLPM_API void clpm_trace_free(clpm_trace* trace);

/* ---- utilities ------------------------------------------------------- */

/* Parses `start:end:count` or `t0,t1,...`. With out == NULL only *count is set. */
CLPM_API clpm_status clpm_parse_time_grid(const char* spec, double* out, size_t capacity,
                                          size_t* count);

typedef void (*clpm_check_callback)(const char* name, int passed, const char* detail,
                                    void* user);

/* Oracle suite on random instances; *all_passed is 1 when every check passed. */
CLPM_API clpm_status clpm_selftest(uint64_t seed, size_t instances, clpm_check_callback callback,
                                   void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
