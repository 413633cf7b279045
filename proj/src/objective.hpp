#pragma once

#include <span>
#include <vector>

#include "likelihood.hpp"
#include "penalties.hpp"
#include "trajectories.hpp"

namespace clpm {

/// Elementwise positive map used for projection coordinates: z = log(1 + e^w).
double softplus(double w);
double softplus_inverse(double z);

/// Log-likelihood plus log-penalty, with the additive constant dropped.
struct ObjectiveParts {
  LoglikParts loglik;
  double penalty = 0.0;

  double total() const { return loglik.total() + penalty; }
};

/// Penalized objective bound to one data set, grid and penalty.
///
/// Gradients are taken with respect to the free parameters: beta and raw
/// coordinates for the distance variant; pre-softplus coordinates (and no
/// beta) for the projection variant.
class Objective {
 public:
  Objective(const EventList& events, ChangePointGrid grid, Variant variant,
            PenaltyParams penalty);

  const ChangePointGrid& grid() const { return grid_; }
  const DyadTable& dyads() const { return dyads_; }
  Variant variant() const { return variant_; }
  const PenaltyParams& penalty() const { return penalty_; }
  std::size_t num_nodes() const { return dyads_.num_nodes(); }
  std::size_t num_events() const { return dyads_.total_events(); }

  ObjectiveParts parts(const ModelState& state) const;
  double value(const ModelState& state) const { return parts(state).total(); }

  /// psi_i: half of every dyad term involving i plus i's own penalty.
  double node_term(const ModelState& state, NodeId i) const;

  Gradient gradient(const ModelState& state) const;
  Gradient node_gradient(const ModelState& state, NodeId i) const;

  /// (n / |batch|) * sum of node gradients over the batch (duplicates count).
  Gradient minibatch_gradient(const ModelState& state, std::span<const NodeId> batch) const;

 private:
  void check(const ModelState& state) const;
  void dyad_gradient(const ModelState& state, NodeId i, NodeId j, double weight,
                     Gradient& grad) const;
  void penalty_gradient(const ModelState& state, NodeId i, double weight, Gradient& grad) const;
  void to_free_parameters(const ModelState& state, Gradient& grad) const;

  ChangePointGrid grid_;
  DyadTable dyads_;
  Variant variant_;
  PenaltyParams penalty_;
};

/// Convenience wrappers over Objective.
double objective(const ModelState& state, const ChangePointGrid& grid, const EventList& events,
                 const PenaltyParams& penalty);
double node_term(const ModelState& state, const ChangePointGrid& grid, const EventList& events,
                 const PenaltyParams& penalty, NodeId i);
Gradient gradient(const ModelState& state, const ChangePointGrid& grid, const EventList& events,
                  const PenaltyParams& penalty);
Gradient minibatch_gradient_estimate(const ModelState& state, const ChangePointGrid& grid,
                                     const EventList& events, const PenaltyParams& penalty,
                                     std::span<const NodeId> batch);

/// Free-parameter vector [beta?, coords...] of a state, and its inverse.
std::vector<double> pack_parameters(const ModelState& state);
void unpack_parameters(std::span<const double> params, ModelState& state);
std::vector<double> pack_gradient(Variant variant, const Gradient& grad);

}  // namespace clpm
