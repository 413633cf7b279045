#pragma once

#include <span>

#include "likelihood.hpp"
#include "trajectories.hpp"

// Projection variant: rate(t) = <z_i(t), z_j(t)>, positions in the positive orthant.
namespace clpm::projection {

/// Floor applied to the rate inside log(); hits are reported, not hidden.
inline constexpr double kRateFloor = 1e-12;

/// Dot products between the knot positions bounding segment g (h = g + 1).
struct DotProductTable {
  double gg = 0.0;  // <z_i(g), z_j(g)>
  double gh = 0.0;  // <z_i(g), z_j(h)>
  double hg = 0.0;  // <z_i(h), z_j(g)>
  double hh = 0.0;  // <z_i(h), z_j(h)>
};

DotProductTable dot_products(const TrajectorySet& traj, NodeId i, NodeId j, std::size_t g);

double rate(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j, double t);

/// Exact integral of the rate over [0, T].
double integral(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j);

/// Contribution of one dyad: sum of log rates at its events minus the integral.
/// Floor hits are appended to `parts`.
void dyad_loglik(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j,
                 std::span<const double> times, LoglikParts& parts);

/// Adds weight * d(dyad loglik)/dz into grad (positions, not pre-softplus parameters).
void dyad_gradient(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j,
                   std::span<const double> times, double weight, Gradient& grad);

LoglikParts loglik(const ModelState& state, const ChangePointGrid& grid, const DyadTable& dyads);
LoglikParts loglik(const ModelState& state, const ChangePointGrid& grid, const EventList& events);

}  // namespace clpm::projection
