#include "optimizer.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gradcheck.hpp"

namespace clpm {

namespace {

// Which block of the model a non-finite value sits in, for error messages.
std::string locate_nonfinite(const ModelState& state) {
  if (!std::isfinite(state.beta)) return "intercept";
  const auto& traj = state.trajectories;
  for (std::size_t i = 0; i < traj.num_nodes(); ++i) {
    for (std::size_t k = 0; k < traj.num_knots(); ++k) {
      for (double v : traj.at(i, k)) {
        if (!std::isfinite(v)) {
          return "node " + std::to_string(i) + " knot " + std::to_string(k);
        }
      }
    }
  }
  return "likelihood terms (parameters finite)";
}

std::string gradient_block(Variant variant, const ModelState& state, std::size_t index) {
  if (variant == Variant::distance) {
    if (index == 0) return "intercept";
    --index;
  }
  const std::size_t per_node = state.trajectories.num_knots() * state.trajectories.dim();
  const std::size_t node = index / per_node;
  const std::size_t knot = (index % per_node) / state.trajectories.dim();
  return "node " + std::to_string(node) + " knot " + std::to_string(knot);
}

}  // namespace

void OptimizerConfig::validate(std::size_t num_nodes) const {
  if (max_iters < 1) throw DomainError("max_iters must be at least 1");
  if (mode == BatchMode::minibatch && batch_size != 0 &&
      (batch_size < 1 || batch_size > num_nodes)) {
    throw DomainError("batch_size must lie in [1, N]");
  }
  if (!(step > 0.0)) throw DomainError("step must be positive");
  if (!(convergence_tol > 0.0)) throw DomainError("convergence_tol must be positive");
  if (trace_interval < 1) throw DomainError("trace_interval must be at least 1");
  if (step_rule == StepRule::adaptive_moments &&
      !(decay1 >= 0.0 && decay1 < 1.0 && decay2 >= 0.0 && decay2 < 1.0 && eps > 0.0)) {
    throw DomainError("adaptive step needs decay rates in [0, 1) and eps > 0");
  }
}

ModelState initial_state(const EventList& events, const ChangePointGrid& grid, Variant variant,
                         std::size_t dim, std::uint64_t seed, double init_sd) {
  const std::size_t n = events.num_nodes();
  ModelState state;
  state.variant = variant;
  state.trajectories = TrajectorySet(n, grid.size(), dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, init_sd);
  for (double& v : state.trajectories.values()) {
    const double w = noise(rng);
    v = variant == Variant::projection ? softplus(w) : w;
  }
  if (variant == Variant::distance && n >= 2) {
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double count = std::max<double>(static_cast<double>(events.size()), 1.0);
    state.beta = std::log(count / (grid.horizon() * pairs));
  }
  return state;
}

FitResult fit(const EventList& events, const ChangePointGrid& grid, Variant variant,
              const PenaltyParams& penalty, const OptimizerConfig& config,
              const ModelState* start) {
  const std::size_t n = events.num_nodes();
  if (n < 2) throw DomainError("fitting needs at least two nodes");
  config.validate(n);
  const Objective objective(events, grid, variant, penalty);

  ModelState state = start ? *start
                           : initial_state(events, grid, variant, config.dim, config.seed,
                                           config.init_sd);
  state.validate(grid);
  if (state.variant != variant) throw VariantMismatch("starting state has the wrong variant");

  FitResult result;
  if (config.grad_check) {
    result.grad_check_error = check_gradient(objective, state).max_relative_error;
  }

  auto params = pack_parameters(state);
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
  const std::size_t batch_size =
      config.batch_size == 0 ? std::max<std::size_t>(1, n / 10) : config.batch_size;
  std::mt19937_64 batch_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::vector<NodeId> batch(batch_size);

  // Best objective at each trace point, for the windowed convergence test.
  std::vector<TracePoint> best_history;
  bool have_best = false;

  auto record = [&](std::size_t iter) {
    const double f = objective.value(state);
    if (!std::isfinite(f)) {
      std::ostringstream msg;
      msg << "non-finite objective at iteration " << iter << " (" << locate_nonfinite(state)
          << ")";
      throw NumericError(msg.str());
    }
    result.trace.push_back({iter, f});
    if (!have_best || f > result.best_objective) {
      result.best_objective = f;
      result.state = state;
      have_best = true;
    }
    best_history.push_back({iter, result.best_objective});
  };

  auto converged = [&](std::size_t iter) {
    if (iter < config.convergence_window) return false;
    const std::size_t cutoff = iter - config.convergence_window;
    const TracePoint* then = nullptr;
    for (const auto& p : best_history) {
      if (p.iteration <= cutoff) then = &p;
      else break;
    }
    if (!then) return false;
    const double gain = result.best_objective - then->objective;
    return gain <= config.convergence_tol * std::max(std::abs(then->objective), 1e-300);
  };

  std::size_t iter = 0;
  for (; iter < config.max_iters; ++iter) {
    unpack_parameters(params, state);
    if (config.mode == BatchMode::full_batch || iter % config.trace_interval == 0) {
      record(iter);
      if (converged(iter)) {
        result.converged = true;
        break;
      }
    }

    Gradient grad = [&] {
      if (config.mode == BatchMode::full_batch) return objective.gradient(state);
      for (auto& node : batch) node = pick(batch_rng);
      return objective.minibatch_gradient(state, batch);
    }();
    const auto g = pack_gradient(variant, grad);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!std::isfinite(g[k])) {
        throw NumericError("non-finite gradient at iteration " + std::to_string(iter) + " (" +
                           gradient_block(variant, state, k) + ")");
      }
    }

    if (config.step_rule == StepRule::fixed) {
      for (std::size_t k = 0; k < g.size(); ++k) params[k] += config.step * g[k];
    } else {
      const double t = static_cast<double>(iter + 1);
      const double c1 = 1.0 - std::pow(config.decay1, t);
      const double c2 = 1.0 - std::pow(config.decay2, t);
      for (std::size_t k = 0; k < g.size(); ++k) {
        m[k] = config.decay1 * m[k] + (1.0 - config.decay1) * g[k];
        v[k] = config.decay2 * v[k] + (1.0 - config.decay2) * g[k] * g[k];
        params[k] += config.step * (m[k] / c1) / (std::sqrt(v[k] / c2) + config.eps);
      }
    }
  }
  if (!result.converged) {
    unpack_parameters(params, state);
    record(iter);
  }
  result.iterations = iter;
  return result;
}

}  // namespace clpm
