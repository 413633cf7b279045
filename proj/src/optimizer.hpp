#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "objective.hpp"

namespace clpm {

enum class BatchMode { full_batch, minibatch };
enum class StepRule { fixed, adaptive_moments };

struct OptimizerConfig {
  BatchMode mode = BatchMode::full_batch;
  std::size_t batch_size = 0;  // 0 selects max(1, N / 10)
  StepRule step_rule = StepRule::adaptive_moments;
  double step = 0.01;
  double decay1 = 0.9;
  double decay2 = 0.999;
  double eps = 1e-8;
  std::size_t max_iters = 1000;
  std::uint64_t seed = 0;
  bool grad_check = false;
  double convergence_tol = 1e-7;
  std::size_t convergence_window = 25;
  std::size_t trace_interval = 1;  // iterations between full objective evaluations
  std::size_t dim = 2;
  double init_sd = 0.1;

  void validate(std::size_t num_nodes) const;
};

struct TracePoint {
  std::size_t iteration = 0;
  double objective = 0.0;
};

struct FitResult {
  ModelState state;  // best-objective iterate
  double best_objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
  std::optional<double> grad_check_error;  // set when config.grad_check
};

/// Raised when the objective or a parameter becomes NaN/inf during fitting.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seeded starting point: Gaussian knot coordinates (pre-softplus for the
/// projection variant) and, for the distance variant, beta at the
/// homogeneous-Poisson rate.
ModelState initial_state(const EventList& events, const ChangePointGrid& grid, Variant variant,
                         std::size_t dim, std::uint64_t seed, double init_sd = 0.1);

/// Penalized maximum-likelihood fit by gradient ascent. When `start` is given
/// it replaces the seeded initialization.
FitResult fit(const EventList& events, const ChangePointGrid& grid, Variant variant,
              const PenaltyParams& penalty, const OptimizerConfig& config,
              const ModelState* start = nullptr);

}  // namespace clpm
