#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "penalties.hpp"
#include "trajectories.hpp"

// Reference evaluations that avoid every closed form: adaptive quadrature of
// the interpolated rate, direct sums of log rates, and naive penalty loops.
namespace clpm::oracle {

/// Adaptive Gauss-Kronrod (61-point) quadrature of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-11);

/// Rate of dyad (i, j) at t from interpolated positions.
double direct_rate(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j,
                   double t);

/// Quadrature of the rate, segment by segment.
double rate_integral(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j);

/// Sum over events of log rate minus sum over dyads of the quadrature integral.
double loglik(const ModelState& state, const ChangePointGrid& grid, const EventList& events);

/// Straightforward double loop over nodes and knots.
double penalty_distance(const TrajectorySet& traj, const ChangePointGrid& grid,
                        const PenaltyParams& params);

/// Truncated-normal log-density with its normalizer obtained by quadrature.
double truncated_normal_log_pdf(double x, double mean, double variance, double lower,
                                double upper);

double penalty_projection(const TrajectorySet& traj, const ChangePointGrid& grid,
                          const PenaltyParams& params);

double objective(const ModelState& state, const ChangePointGrid& grid, const EventList& events,
                 const PenaltyParams& params);

struct RandomInstance {
  ModelState state;
  ChangePointGrid grid;
  EventList events;
};

struct RandomInstanceOptions {
  std::size_t max_nodes = 5;
  std::size_t max_knots = 6;
  std::size_t dim = 2;
  double coord_bound = 2.0;  // distance: [-b, b]; projection: (0.05, b]
  double beta_bound = 2.0;
  std::size_t max_events_per_dyad = 4;
};

/// Random state, grid and uniformly placed events (2..max_nodes nodes,
/// 2..max_knots knots on a horizon in [1, 10]).
RandomInstance random_instance(Variant variant, std::uint64_t seed,
                               const RandomInstanceOptions& options = {});

/// One line of a self-test run.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quadrature, gradient and unbiasedness checks on `instances` random cases
/// per variant.
std::vector<CheckResult> run_selftest(std::uint64_t seed, std::size_t instances = 50);

}  // namespace clpm::oracle
