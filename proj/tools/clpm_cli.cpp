// Command-line front end over the C API.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clpm/clpm.h"

namespace {

int report(clpm_status status) {
  std::fprintf(stderr, "clpm: %s: %s\n", clpm_status_name(status), clpm_last_error());
  return static_cast<int>(status) + 1;
}

#define CHECK(call)                      \
  do {                                   \
    const clpm_status s_ = (call);       \
    if (s_ != CLPM_OK) return report(s_); \
  } while (0)

bool parse_grid(const std::string& spec, std::vector<double>& out) {
  size_t count = 0;
  if (clpm_parse_time_grid(spec.c_str(), nullptr, 0, &count) != CLPM_OK) return false;
  out.resize(count);
  return clpm_parse_time_grid(spec.c_str(), out.data(), out.size(), &count) == CLPM_OK;
}

struct Penalty {
  double sigma0_sq;
  double sigma_sq;
  double mu_angle;
};

void add_penalty_flags(CLI::App* cmd, Penalty& p) {
  cmd->add_option("--sigma0", p.sigma0_sq, "Initial-position variance (distance)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sigma", p.sigma_sq, "Increment variance per unit time")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mu-angle", p.mu_angle, "Mean knot-to-knot cosine (projection)")
      ->check(CLI::Range(0.0, 1.0));
}

clpm_variant parse_variant(const std::string& name) {
  return name == "projection" ? CLPM_PROJECTION : CLPM_DISTANCE;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string scenario = "sim3";
  std::string model;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  double beta = 1.0;
  std::string out;
  std::string truth;
  std::string truth_model;
  std::string times = "0:10:101";
};

int run_simulate(const SimulateArgs& a) {
  clpm_events* events = nullptr;
  clpm_model* truth = nullptr;
  if (a.scenario == "model") {
    if (a.model.empty()) {
      std::fprintf(stderr, "clpm: --scenario model needs --model\n");
      return 2;
    }
    CHECK(clpm_model_read(a.model.c_str(), &truth));
    const clpm_status s = clpm_model_simulate(truth, a.seed, &events);
    if (s != CLPM_OK) {
      clpm_model_free(truth);
      return report(s);
    }
  } else {
    clpm_scenario_options opts;
    clpm_scenario_options_default(&opts);
    opts.scenario = a.scenario.c_str();
    opts.seed = a.seed;
    opts.num_nodes = a.nodes;
    opts.beta = a.beta;
    CHECK(clpm_simulate(&opts, &events, &truth));
    if (!a.truth.empty() && !truth) {
      const clpm_status s = clpm_write_memberships(&opts, a.truth.c_str());
      if (s != CLPM_OK) {
        clpm_events_free(events);
        return report(s);
      }
    }
  }

  clpm_status s = clpm_events_write(events, a.out.c_str());
  if (s == CLPM_OK && truth && !a.truth.empty()) {
    std::vector<double> times;
    if (!parse_grid(a.times, times)) {
      s = CLPM_ERR_PARSE;
    } else {
      s = clpm_model_write_snapshots(truth, times.data(), times.size(), a.truth.c_str());
    }
  }
  if (s == CLPM_OK && truth && !a.truth_model.empty()) {
    s = clpm_model_write(truth, a.truth_model.c_str());
  }
  if (s == CLPM_OK) {
    std::printf("%zu events on %zu nodes over [0, %g] -> %s\n", clpm_events_count(events),
                clpm_events_num_nodes(events), clpm_events_horizon(events), a.out.c_str());
  }
  clpm_events_free(events);
  clpm_model_free(truth);
  return s == CLPM_OK ? 0 : report(s);
}

// ---- fit ------------------------------------------------------------------

struct FitArgs {
  std::string events;
  std::string variant = "distance";
  std::string knots;
  std::string out;
  std::string trace;
  std::string init;
  std::string mode = "full";
  std::string step_rule = "adaptive";
  double horizon = 0.0;
  bool grad_check = false;
  Penalty penalty{};
  clpm_fit_options opts{};
};

int run_fit(FitArgs& a) {
  std::vector<double> knots;
  if (!parse_grid(a.knots, knots)) return report(CLPM_ERR_PARSE);
  const double horizon = a.horizon > 0.0 ? a.horizon : knots.back();

  clpm_events* events = nullptr;
  CHECK(clpm_events_read(a.events.c_str(), horizon, &events));
  clpm_model* start = nullptr;
  if (!a.init.empty()) {
    const clpm_status s = clpm_model_read(a.init.c_str(), &start);
    if (s != CLPM_OK) {
      clpm_events_free(events);
      return report(s);
    }
  }

  a.opts.variant = parse_variant(a.variant);
  a.opts.knots = knots.data();
  a.opts.num_knots = knots.size();
  a.opts.sigma0_sq = a.penalty.sigma0_sq;
  a.opts.sigma_sq = a.penalty.sigma_sq;
  a.opts.mu_angle = a.penalty.mu_angle;
  a.opts.mode = a.mode == "minibatch" ? CLPM_MINIBATCH : CLPM_FULL_BATCH;
  a.opts.step_rule = a.step_rule == "fixed" ? CLPM_STEP_FIXED : CLPM_STEP_ADAPTIVE;
  a.opts.grad_check = a.grad_check ? 1 : 0;

  clpm_model* model = nullptr;
  clpm_trace* trace = nullptr;
  clpm_status s = clpm_fit(events, &a.opts, start, &model, &trace);
  if (s == CLPM_OK) s = clpm_model_write(model, a.out.c_str());
  if (s == CLPM_OK && !a.trace.empty()) s = clpm_trace_write(trace, a.trace.c_str());
  if (s == CLPM_OK) {
    double best = 0.0;
    size_t iterations = 0;
    clpm_model_fit_info(model, nullptr, &iterations, &best, nullptr);
    std::printf("%s fit: %zu nodes, %zu events, %zu iterations%s, objective %.10g\n",
                a.variant.c_str(), clpm_events_num_nodes(events), clpm_events_count(events),
                iterations, clpm_trace_converged(trace) ? " (converged)" : "", best);
    if (a.grad_check) {
      std::printf("initial gradient check: max relative error %.3g\n",
                  clpm_trace_grad_check(trace));
    }
  }
  clpm_trace_free(trace);
  clpm_model_free(model);
  clpm_model_free(start);
  clpm_events_free(events);
  return s == CLPM_OK ? 0 : report(s);
}

// ---- snapshot -------------------------------------------------------------

int run_snapshot(const std::string& model_path, const std::string& times_spec,
                 const std::string& out) {
  std::vector<double> times;
  if (!parse_grid(times_spec, times)) return report(CLPM_ERR_PARSE);
  clpm_model* model = nullptr;
  CHECK(clpm_model_read(model_path.c_str(), &model));
  const clpm_status s = clpm_model_write_snapshots(model, times.data(), times.size(), out.c_str());
  if (s == CLPM_OK) {
    std::printf("%zu rows -> %s\n", times.size() * clpm_model_num_nodes(model), out.c_str());
  }
  clpm_model_free(model);
  return s == CLPM_OK ? 0 : report(s);
}

// ---- loglik / gradcheck -----------------------------------------------------

// Loads a model and its events; penalty fields that are not NaN override the
// model's own.
clpm_status load_pair(const std::string& model_path, const std::string& events_path,
                      const Penalty& penalty, clpm_model** model, clpm_events** events) {
  clpm_status s = clpm_model_read(model_path.c_str(), model);
  if (s == CLPM_OK) {
    Penalty p{};
    clpm_model_penalty(*model, &p.sigma0_sq, &p.sigma_sq, &p.mu_angle);
    if (!std::isnan(penalty.sigma0_sq)) p.sigma0_sq = penalty.sigma0_sq;
    if (!std::isnan(penalty.sigma_sq)) p.sigma_sq = penalty.sigma_sq;
    if (!std::isnan(penalty.mu_angle)) p.mu_angle = penalty.mu_angle;
    s = clpm_model_set_penalty(*model, p.sigma0_sq, p.sigma_sq, p.mu_angle);
  }
  if (s == CLPM_OK) s = clpm_events_read_for_model(events_path.c_str(), *model, events);
  return s;
}

int run_loglik(const std::string& model_path, const std::string& events_path,
               const Penalty& penalty) {
  clpm_model* model = nullptr;
  clpm_events* events = nullptr;
  clpm_status s = load_pair(model_path, events_path, penalty, &model, &events);
  clpm_objective_parts parts{};
  if (s == CLPM_OK) s = clpm_evaluate(model, events, &parts);
  if (s == CLPM_OK) {
    std::printf("event_term     %.17g\n", parts.event_term);
    std::printf("integral_term  %.17g\n", parts.integral_term);
    std::printf("loglik         %.17g\n", parts.loglik);
    std::printf("penalty        %.17g\n", parts.penalty);
    std::printf("objective      %.17g\n", parts.total);
    if (parts.floor_hits > 0) {
      std::fprintf(stderr, "warning: %zu event(s) had a rate below the log floor\n",
                   parts.floor_hits);
    }
  }
  clpm_events_free(events);
  clpm_model_free(model);
  return s == CLPM_OK ? 0 : report(s);
}

struct GradcheckArgs {
  std::string model;
  std::string events;
  std::string variant = "distance";
  std::uint64_t seed = 0;
  double h = 1e-5;
  double tol = 1e-5;
};

int run_gradcheck(const GradcheckArgs& a, const Penalty& penalty) {
  clpm_model* model = nullptr;
  clpm_events* events = nullptr;
  clpm_status s = a.model.empty()
                      ? clpm_random_instance(parse_variant(a.variant), a.seed, &model, &events)
                      : load_pair(a.model, a.events, penalty, &model, &events);
  clpm_gradcheck_report rep{};
  if (s == CLPM_OK) s = clpm_gradcheck(model, events, a.h, &rep);
  int code = 0;
  if (s == CLPM_OK) {
    std::printf("parameters %zu, max relative error %.3e at index %zu (analytic %.10g, "
                "numeric %.10g)\n",
                rep.num_parameters, rep.max_relative_error, rep.worst_index, rep.analytic,
                rep.numeric);
    code = rep.max_relative_error < a.tol ? 0 : 1;
    std::printf("%s (tolerance %.1e)\n", code == 0 ? "PASS" : "FAIL", a.tol);
  }
  clpm_events_free(events);
  clpm_model_free(model);
  return s == CLPM_OK ? code : report(s);
}

// ---- selftest -------------------------------------------------------------

void print_check(const char* name, int passed, const char* detail, void*) {
  std::printf("[%s] %s: %s\n", passed ? "PASS" : "FAIL", name, detail);
}

int run_selftest(std::uint64_t seed, std::size_t instances) {
  int all = 0;
  CHECK(clpm_selftest(seed, instances, print_check, nullptr, &all));
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous latent position models for timestamped interactions"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", clpm_version());

  clpm_fit_options defaults;
  clpm_fit_options_default(&defaults);
  const Penalty default_penalty{defaults.sigma0_sq, defaults.sigma_sq, defaults.mu_angle};
  const double unset = std::nan("");
  const Penalty keep_penalty{unset, unset, unset};
  const std::vector<std::string> variants{"projection", "distance"};

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate events from a scenario");
  simulate->add_option("--scenario", sim.scenario, "sim1, sim2, sim3 or model")
      ->check(CLI::IsMember({"sim1", "sim2", "sim3", "model"}));
  simulate->add_option("--model", sim.model, "Generating model for --scenario model");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--nodes", sim.nodes, "Node count (sim2, sim3)");
  simulate->add_option("--beta", sim.beta, "Intercept (sim3)");
  simulate->add_option("--out", sim.out, "Events CSV")->required();
  simulate->add_option("--truth", sim.truth,
                       "Ground truth CSV: trajectories (sim3, model) or memberships");
  simulate->add_option("--truth-model", sim.truth_model, "Generating model JSON (sim3)");
  simulate->add_option("--times", sim.times, "Snapshot times for --truth");

  FitArgs fa;
  fa.opts = defaults;
  fa.penalty = default_penalty;
  auto* fit = app.add_subcommand("fit", "Fit a model by penalized maximum likelihood");
  fit->add_option("--events", fa.events, "Events CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--variant", fa.variant, "projection or distance")
      ->check(CLI::IsMember(variants));
  fit->add_option("--knots", fa.knots, "start:end:count or comma-separated knots")->required();
  add_penalty_flags(fit, fa.penalty);
  fit->add_option("--step", fa.opts.step, "Step size")->check(CLI::PositiveNumber);
  fit->add_option("--step-rule", fa.step_rule, "adaptive or fixed")
      ->check(CLI::IsMember({"adaptive", "fixed"}));
  fit->add_option("--iters", fa.opts.max_iters, "Maximum iterations")->check(CLI::PositiveNumber);
  fit->add_option("--mode", fa.mode, "full or minibatch")
      ->check(CLI::IsMember({"full", "minibatch"}));
  fit->add_option("--batch-size", fa.opts.batch_size, "Nodes per minibatch (0: N/10)");
  fit->add_option("--seed", fa.opts.seed, "Random seed");
  fit->add_option("--horizon", fa.horizon, "Observation horizon (default: last knot)");
  fit->add_option("--dim", fa.opts.dim, "Latent dimension")->check(CLI::PositiveNumber);
  fit->add_option("--tol", fa.opts.convergence_tol, "Relative improvement threshold");
  fit->add_option("--trace-interval", fa.opts.trace_interval, "Minibatch iterations per trace point")
      ->check(CLI::PositiveNumber);
  fit->add_option("--init", fa.init, "Start from this model instead of a random draw");
  fit->add_flag("--grad-check", fa.grad_check, "Check the gradient at the starting point");
  fit->add_option("--out", fa.out, "Model JSON")->required();
  fit->add_option("--trace", fa.trace, "Objective trace CSV");

  std::string snap_model, snap_times, snap_out;
  auto* snapshot = app.add_subcommand("snapshot", "Export positions on a time grid");
  snapshot->add_option("--model", snap_model, "Model JSON")->required()->check(CLI::ExistingFile);
  snapshot->add_option("--times", snap_times, "start:end:count or a list")->required();
  snapshot->add_option("--out", snap_out, "Snapshot CSV")->required();

  std::string ll_model, ll_events;
  Penalty ll_penalty = keep_penalty;
  auto* loglik = app.add_subcommand("loglik", "Print the objective decomposition");
  loglik->add_option("--model", ll_model, "Model JSON")->required()->check(CLI::ExistingFile);
  loglik->add_option("--events", ll_events, "Events CSV")->required()->check(CLI::ExistingFile);
  add_penalty_flags(loglik, ll_penalty);

  GradcheckArgs ga;
  Penalty gc_penalty = keep_penalty;
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Compare the gradient with central differences (random model by default)");
  gradcheck->add_option("--model", ga.model, "Model JSON")->check(CLI::ExistingFile);
  gradcheck->add_option("--events", ga.events, "Events CSV")->check(CLI::ExistingFile);
  gradcheck->add_option("--variant", ga.variant, "Variant of the random model")
      ->check(CLI::IsMember(variants));
  gradcheck->add_option("--seed", ga.seed, "Seed of the random model");
  gradcheck->add_option("--fd-step", ga.h, "Finite-difference step")->check(CLI::PositiveNumber);
  gradcheck->add_option("--tol", ga.tol, "Pass threshold")->check(CLI::PositiveNumber);
  add_penalty_flags(gradcheck, gc_penalty);

  std::uint64_t st_seed = 1;
  std::size_t st_instances = 50;
  auto* selftest = app.add_subcommand("selftest", "Run the closed-form oracle suite");
  selftest->add_option("--seed", st_seed, "Seed");
  selftest->add_option("--instances", st_instances, "Random instances per variant")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (*simulate) return run_simulate(sim);
  if (*fit) return run_fit(fa);
  if (*snapshot) return run_snapshot(snap_model, snap_times, snap_out);
  if (*loglik) return run_loglik(ll_model, ll_events, ll_penalty);
  if (*gradcheck) {
    if (!ga.model.empty() && ga.events.empty()) {
      std::fprintf(stderr, "clpm: gradcheck --model needs --events\n");
      return 2;
    }
    return run_gradcheck(ga, gc_penalty);
  }
  if (*selftest) return run_selftest(st_seed, st_instances);
  return 2;
}
