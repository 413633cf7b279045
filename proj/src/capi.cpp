#include "clpm/clpm.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "generators.hpp"
#include "gradcheck.hpp"
#include "io.hpp"
#include "objective.hpp"
#include "optimizer.hpp"
#include "oracle.hpp"

struct clpm_events {
  clpm::EventList rep;
};

struct clpm_model {
  clpm::io::ModelFile rep;
};

struct clpm_trace {
  clpm::FitResult rep;
};

namespace {

thread_local std::string last_error;

clpm_status fail(clpm_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body, mapping exceptions to status codes.
template <typename Body>
clpm_status guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return CLPM_OK;
  } catch (const clpm::io::ParseError& e) {
    return fail(CLPM_ERR_PARSE, e.what());
  } catch (const clpm::io::IoError& e) {
    return fail(CLPM_ERR_IO, e.what());
  } catch (const clpm::VariantMismatch& e) {
    return fail(CLPM_ERR_VARIANT_MISMATCH, e.what());
  } catch (const clpm::NumericError& e) {
    return fail(CLPM_ERR_NUMERIC, e.what());
  } catch (const clpm::DomainError& e) {
    return fail(CLPM_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CLPM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CLPM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CLPM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CLPM_ERR_INTERNAL, "unknown error");
  }
}

#define CLPM_REQUIRE(cond, what) \
  if (!(cond)) return fail(CLPM_ERR_INVALID_ARGUMENT, what)

clpm::Variant to_variant(clpm_variant v) {
  switch (v) {
    case CLPM_PROJECTION:
      return clpm::Variant::projection;
    case CLPM_DISTANCE:
      return clpm::Variant::distance;
  }
  throw std::invalid_argument("unknown variant");
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

clpm::generators::Sim2Options sim2_options(const clpm_scenario_options& o) {
  clpm::generators::Sim2Options opts;
  if (o.num_nodes != 0) opts.num_nodes = o.num_nodes;
  return opts;
}

clpm::generators::BlockSchedule block_schedule(const clpm_scenario_options& o) {
  const std::string name = o.scenario;
  if (name == "sim1") return clpm::generators::make_sim1_schedule();
  if (name == "sim2") return clpm::generators::make_sim2_schedule(sim2_options(o));
  throw std::invalid_argument("no blockmodel schedule for scenario '" + name + "'");
}

}  // namespace

extern "C" {

const char* clpm_last_error(void) { return last_error.c_str(); }

const char* clpm_status_name(clpm_status status) {
  switch (status) {
    case CLPM_OK:
      return "ok";
    case CLPM_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case CLPM_ERR_DOMAIN:
      return "domain error";
    case CLPM_ERR_IO:
      return "i/o error";
    case CLPM_ERR_PARSE:
      return "parse error";
    case CLPM_ERR_VARIANT_MISMATCH:
      return "variant mismatch";
    case CLPM_ERR_NUMERIC:
      return "numeric error";
    case CLPM_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* clpm_version(void) { return "1.0.0"; }

clpm_status clpm_events_read(const char* path, double horizon, clpm_events** out) {
  CLPM_REQUIRE(path && out, "path and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    clpm::io::ReadEventsOptions opts;
    if (horizon > 0.0) opts.horizon = horizon;
    *out = new clpm_events{clpm::io::read_events(path, opts)};
  });
}

clpm_status clpm_events_read_for_model(const char* path, const clpm_model* model,
                                       clpm_events** out) {
  CLPM_REQUIRE(path && model && out, "path, model and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    clpm::io::ReadEventsOptions opts;
    opts.horizon = model->rep.grid.horizon();
    opts.known_labels = model->rep.labels;
    *out = new clpm_events{clpm::io::read_events(path, opts)};
  });
}

clpm_status clpm_events_write(const clpm_events* events, const char* path) {
  CLPM_REQUIRE(events && path, "events and path must be non-null");
  return guarded([&] { clpm::io::write_events(events->rep, path); });
}

size_t clpm_events_count(const clpm_events* events) { return events ? events->rep.size() : 0; }

size_t clpm_events_num_nodes(const clpm_events* events) {
  return events ? events->rep.num_nodes() : 0;
}

double clpm_events_horizon(const clpm_events* events) {
  return events ? events->rep.horizon() : 0.0;
}

clpm_status clpm_events_get(const clpm_events* events, size_t index, double* time, uint32_t* a,
                            uint32_t* b) {
  CLPM_REQUIRE(events, "events must be non-null");
  if (index >= events->rep.size()) return fail(CLPM_ERR_DOMAIN, "event index out of range");
  const auto& e = events->rep.events()[index];
  if (time) *time = e.time;
  if (a) *a = e.a;
  if (b) *b = e.b;
  return CLPM_OK;
}

void clpm_events_free(clpm_events* events) { delete events; }

void clpm_scenario_options_default(clpm_scenario_options* options) {
  if (!options) return;
  options->scenario = "sim3";
  options->seed = 0;
  options->num_nodes = 0;
  options->beta = 1.0;
  options->radius = 1.0;
  options->period = 10.0;
}

clpm_status clpm_simulate(const clpm_scenario_options* options, clpm_events** events,
                          clpm_model** truth) {
  CLPM_REQUIRE(options && options->scenario && events, "options and events must be non-null");
  *events = nullptr;
  if (truth) *truth = nullptr;
  return guarded([&] {
    const std::string name = options->scenario;
    if (name == "sim3") {
      const std::size_t n = options->num_nodes != 0 ? options->num_nodes : 20;
      auto ring = clpm::generators::make_ring_trajectories(n, options->radius, options->period);
      clpm::ModelState state{clpm::Variant::distance, std::move(ring.trajectories), options->beta};
      auto sample = clpm::generators::simulate_clpm(state, ring.grid, options->seed);
      if (truth) {
        clpm::io::ModelFile file{std::move(state), ring.grid, default_labels(n), {}, {}};
        file.fit.seed = options->seed;
        *truth = new clpm_model{std::move(file)};
      }
      *events = new clpm_events{std::move(sample)};
      return;
    }
    *events = new clpm_events{
        clpm::generators::simulate_blockmodel(block_schedule(*options), options->seed)};
  });
}

clpm_status clpm_write_memberships(const clpm_scenario_options* options, const char* path) {
  CLPM_REQUIRE(options && options->scenario && path, "options and path must be non-null");
  return guarded([&] { clpm::io::write_memberships(block_schedule(*options), path); });
}

clpm_status clpm_model_simulate(const clpm_model* model, uint64_t seed, clpm_events** out) {
  CLPM_REQUIRE(model && out, "model and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    auto sample = clpm::generators::simulate_clpm(model->rep.state, model->rep.grid, seed);
    *out = new clpm_events{clpm::EventList(sample.events(), sample.horizon(), sample.num_nodes(),
                                           model->rep.labels)};
  });
}

clpm_status clpm_model_read(const char* path, clpm_model** out) {
  CLPM_REQUIRE(path && out, "path and out must be non-null");
  *out = nullptr;
  return guarded([&] { *out = new clpm_model{clpm::io::read_model(path)}; });
}

clpm_status clpm_model_write(const clpm_model* model, const char* path) {
  CLPM_REQUIRE(model && path, "model and path must be non-null");
  return guarded([&] { clpm::io::write_model(model->rep, path); });
}

void clpm_model_free(clpm_model* model) { delete model; }

clpm_variant clpm_model_variant(const clpm_model* model) {
  return model && model->rep.state.variant == clpm::Variant::projection ? CLPM_PROJECTION
                                                                         : CLPM_DISTANCE;
}

size_t clpm_model_num_nodes(const clpm_model* model) {
  return model ? model->rep.state.trajectories.num_nodes() : 0;
}

size_t clpm_model_num_knots(const clpm_model* model) { return model ? model->rep.grid.size() : 0; }

size_t clpm_model_dim(const clpm_model* model) {
  return model ? model->rep.state.trajectories.dim() : 0;
}

double clpm_model_beta(const clpm_model* model) { return model ? model->rep.state.beta : 0.0; }

double clpm_model_knot(const clpm_model* model, size_t k) {
  if (!model || k >= model->rep.grid.size()) return std::numeric_limits<double>::quiet_NaN();
  return model->rep.grid[k];
}

const char* clpm_model_label(const clpm_model* model, size_t i) {
  if (!model || i >= model->rep.labels.size()) return nullptr;
  return model->rep.labels[i].c_str();
}

clpm_status clpm_model_position(const clpm_model* model, size_t i, double t, double* out) {
  CLPM_REQUIRE(model && out, "model and out must be non-null");
  if (i >= model->rep.state.trajectories.num_nodes()) {
    return fail(CLPM_ERR_DOMAIN, "node index out of range");
  }
  return guarded([&] {
    const auto z = clpm::interpolate(model->rep.state.trajectories, model->rep.grid,
                                     static_cast<clpm::NodeId>(i), t);
    std::copy(z.begin(), z.end(), out);
  });
}

clpm_status clpm_model_penalty(const clpm_model* model, double* sigma0_sq, double* sigma_sq,
                               double* mu_angle) {
  CLPM_REQUIRE(model, "model must be non-null");
  if (sigma0_sq) *sigma0_sq = model->rep.penalty.sigma0_sq;
  if (sigma_sq) *sigma_sq = model->rep.penalty.sigma_sq;
  if (mu_angle) *mu_angle = model->rep.penalty.mu_angle;
  return CLPM_OK;
}

clpm_status clpm_model_set_penalty(clpm_model* model, double sigma0_sq, double sigma_sq,
                                   double mu_angle) {
  CLPM_REQUIRE(model, "model must be non-null");
  return guarded([&] {
    const clpm::PenaltyParams params{sigma0_sq, sigma_sq, mu_angle};
    params.validate();
    model->rep.penalty = params;
  });
}

clpm_status clpm_model_fit_info(const clpm_model* model, uint64_t* seed, size_t* iterations,
                                double* final_objective, int* has_final_objective) {
  CLPM_REQUIRE(model, "model must be non-null");
  const auto& fit = model->rep.fit;
  if (seed) *seed = fit.seed;
  if (iterations) *iterations = fit.iterations;
  if (final_objective) {
    *final_objective = fit.final_objective.value_or(std::numeric_limits<double>::quiet_NaN());
  }
  if (has_final_objective) *has_final_objective = fit.final_objective.has_value() ? 1 : 0;
  return CLPM_OK;
}

clpm_status clpm_random_instance(clpm_variant variant, uint64_t seed, clpm_model** model,
                                 clpm_events** events) {
  CLPM_REQUIRE(model && events, "model and events must be non-null");
  *model = nullptr;
  *events = nullptr;
  return guarded([&] {
    auto inst = clpm::oracle::random_instance(to_variant(variant), seed);
    const std::size_t n = inst.state.trajectories.num_nodes();
    clpm::io::ModelFile file{std::move(inst.state), inst.grid, default_labels(n), {}, {}};
    file.fit.seed = seed;
    *events = new clpm_events{std::move(inst.events)};
    *model = new clpm_model{std::move(file)};
  });
}

clpm_status clpm_model_write_snapshots(const clpm_model* model, const double* times, size_t count,
                                       const char* path) {
  CLPM_REQUIRE(model && path && (times || count == 0), "model, times and path must be non-null");
  return guarded([&] {
    clpm::io::write_snapshots(model->rep.state, model->rep.grid, model->rep.labels,
                              std::vector<double>(times, times + count), path);
  });
}

clpm_status clpm_evaluate(const clpm_model* model, const clpm_events* events,
                          clpm_objective_parts* out) {
  CLPM_REQUIRE(model && events && out, "model, events and out must be non-null");
  return guarded([&] {
    const clpm::Objective obj(events->rep, model->rep.grid, model->rep.state.variant,
                              model->rep.penalty);
    const auto parts = obj.parts(model->rep.state);
    out->event_term = parts.loglik.event_term;
    out->integral_term = parts.loglik.integral_term;
    out->loglik = parts.loglik.total();
    out->penalty = parts.penalty;
    out->total = parts.total();
    out->floor_hits = parts.loglik.floor_hits.size();
  });
}

clpm_status clpm_gradcheck(const clpm_model* model, const clpm_events* events, double h,
                           clpm_gradcheck_report* out) {
  CLPM_REQUIRE(model && events && out, "model, events and out must be non-null");
  CLPM_REQUIRE(h > 0.0 && std::isfinite(h), "step h must be positive");
  return guarded([&] {
    const clpm::Objective obj(events->rep, model->rep.grid, model->rep.state.variant,
                              model->rep.penalty);
    const auto report = clpm::check_gradient(obj, model->rep.state, h);
    out->max_relative_error = report.max_relative_error;
    out->worst_index = report.worst_index;
    out->analytic = report.analytic;
    out->numeric = report.numeric;
    out->num_parameters = report.num_parameters;
  });
}

void clpm_fit_options_default(clpm_fit_options* options) {
  if (!options) return;
  const clpm::OptimizerConfig config;
  const clpm::PenaltyParams penalty;
  options->variant = CLPM_DISTANCE;
  options->knots = nullptr;
  options->num_knots = 0;
  options->dim = config.dim;
  options->sigma0_sq = penalty.sigma0_sq;
  options->sigma_sq = penalty.sigma_sq;
  options->mu_angle = penalty.mu_angle;
  options->mode = CLPM_FULL_BATCH;
  options->batch_size = config.batch_size;
  options->step_rule = CLPM_STEP_ADAPTIVE;
  options->step = config.step;
  options->decay1 = config.decay1;
  options->decay2 = config.decay2;
  options->eps = config.eps;
  options->max_iters = config.max_iters;
  options->seed = config.seed;
  options->convergence_tol = config.convergence_tol;
  options->convergence_window = config.convergence_window;
  options->trace_interval = config.trace_interval;
  options->init_sd = config.init_sd;
  options->grad_check = 0;
}

clpm_status clpm_fit(const clpm_events* events, const clpm_fit_options* options,
                     const clpm_model* start, clpm_model** model, clpm_trace** trace) {
  CLPM_REQUIRE(events && options && model, "events, options and model must be non-null");
  CLPM_REQUIRE(options->knots && options->num_knots >= 2, "at least two knots are required");
  *model = nullptr;
  if (trace) *trace = nullptr;
  return guarded([&] {
    if (events->rep.num_nodes() < 2) throw clpm::DomainError("fitting needs at least two nodes");
    const clpm::ChangePointGrid grid(
        std::vector<double>(options->knots, options->knots + options->num_knots));
    const clpm::PenaltyParams penalty{options->sigma0_sq, options->sigma_sq, options->mu_angle};
    penalty.validate();

    clpm::OptimizerConfig config;
    config.mode = options->mode == CLPM_MINIBATCH ? clpm::BatchMode::minibatch
                                                  : clpm::BatchMode::full_batch;
    config.batch_size = options->batch_size;
    config.step_rule = options->step_rule == CLPM_STEP_FIXED ? clpm::StepRule::fixed
                                                             : clpm::StepRule::adaptive_moments;
    config.step = options->step;
    config.decay1 = options->decay1;
    config.decay2 = options->decay2;
    config.eps = options->eps;
    config.max_iters = options->max_iters;
    config.seed = options->seed;
    config.grad_check = options->grad_check != 0;
    config.convergence_tol = options->convergence_tol;
    config.convergence_window = options->convergence_window;
    config.trace_interval = options->trace_interval;
    config.dim = options->dim;
    config.init_sd = options->init_sd;

    const clpm::Variant variant = to_variant(options->variant);
    auto result = clpm::fit(events->rep, grid, variant, penalty, config,
                            start ? &start->rep.state : nullptr);

    clpm::io::ModelFile file{result.state, grid, events->rep.labels(), penalty, {}};
    file.fit.seed = options->seed;
    file.fit.iterations = result.iterations;
    file.fit.final_objective = result.best_objective;
    *model = new clpm_model{std::move(file)};
    if (trace) *trace = new clpm_trace{std::move(result)};
  });
}

size_t clpm_trace_size(const clpm_trace* trace) { return trace ? trace->rep.trace.size() : 0; }

clpm_status clpm_trace_get(const clpm_trace* trace, size_t index, size_t* iteration,
                           double* objective) {
  CLPM_REQUIRE(trace, "trace must be non-null");
  if (index >= trace->rep.trace.size()) return fail(CLPM_ERR_DOMAIN, "trace index out of range");
  const auto& point = trace->rep.trace[index];
  if (iteration) *iteration = point.iteration;
  if (objective) *objective = point.objective;
  return CLPM_OK;
}

int clpm_trace_converged(const clpm_trace* trace) {
  return trace && trace->rep.converged ? 1 : 0;
}

double clpm_trace_grad_check(const clpm_trace* trace) {
  if (!trace || !trace->rep.grad_check_error) return std::numeric_limits<double>::quiet_NaN();
  return *trace->rep.grad_check_error;
}

clpm_status clpm_trace_write(const clpm_trace* trace, const char* path) {
  CLPM_REQUIRE(trace && path, "trace and path must be non-null");
  return guarded([&] { clpm::io::write_trace(trace->rep.trace, path); });
}

void clpm_trace_free(clpm_trace* trace) { delete trace; }

clpm_status clpm_parse_time_grid(const char* spec, double* out, size_t capacity, size_t* count) {
  CLPM_REQUIRE(spec && count, "spec and count must be non-null");
  return guarded([&] {
    const auto times = clpm::io::parse_time_grid(spec);
    *count = times.size();
    if (!out) return;
    if (capacity < times.size()) throw std::invalid_argument("output buffer too small");
    std::copy(times.begin(), times.end(), out);
  });
}

clpm_status clpm_selftest(uint64_t seed, size_t instances, clpm_check_callback callback,
                          void* user, int* all_passed) {
  CLPM_REQUIRE(instances > 0, "instances must be positive");
  return guarded([&] {
    bool ok = true;
    for (const auto& r : clpm::oracle::run_selftest(seed, instances)) {
      ok = ok && r.passed;
      if (callback) callback(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
