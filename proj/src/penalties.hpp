#pragma once

#include "likelihood.hpp"
#include "trajectories.hpp"

namespace clpm {

struct PenaltyParams {
  double sigma0_sq = 1.0;  // initial-position variance (distance)
  double sigma_sq = 0.1;   // increment variance per unit time (both variants)
  double mu_angle = 1.0;   // truncated-normal mean of the knot-to-knot cosine (projection)

  void validate() const;
};

namespace penalties {

/// Sum over nodes and segments of the truncated-normal log-density of the
/// cosine between consecutive knot positions. Normalizers included.
double projection(const TrajectorySet& traj, const ChangePointGrid& grid,
                  const PenaltyParams& params);
double projection_node(const TrajectorySet& traj, const ChangePointGrid& grid,
                       const PenaltyParams& params, NodeId i);

/// Gaussian random-walk log-prior with constants dropped; increments scaled
/// by segment length.
double distance(const TrajectorySet& traj, const ChangePointGrid& grid,
                const PenaltyParams& params);
double distance_node(const TrajectorySet& traj, const ChangePointGrid& grid,
                     const PenaltyParams& params, NodeId i);

/// Add weight * gradient of node i's penalty (w.r.t. positions) into grad.
void projection_node_gradient(const TrajectorySet& traj, const ChangePointGrid& grid,
                              const PenaltyParams& params, NodeId i, double weight,
                              Gradient& grad);
void distance_node_gradient(const TrajectorySet& traj, const ChangePointGrid& grid,
                            const PenaltyParams& params, NodeId i, double weight,
                            Gradient& grad);

}  // namespace penalties
}  // namespace clpm
