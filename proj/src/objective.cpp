#include "objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "distance.hpp"
#include "projection.hpp"

namespace clpm {

double softplus(double w) {
  // Clamped so that very negative w still maps to a positive coordinate.
  const double z = w > 0.0 ? w + std::log1p(std::exp(-w)) : std::log1p(std::exp(w));
  return std::max(z, std::numeric_limits<double>::min());
}

double softplus_inverse(double z) {
  if (!(z > 0.0)) throw DomainError("softplus inverse needs a positive argument");
  return z > 30.0 ? z + std::log(-std::expm1(-z)) : std::log(std::expm1(z));
}

Objective::Objective(const EventList& events, ChangePointGrid grid, Variant variant,
                     PenaltyParams penalty)
    : grid_(std::move(grid)), dyads_(events), variant_(variant), penalty_(penalty) {
  penalty_.validate();
  if (events.horizon() > grid_.horizon()) {
    throw DomainError("event horizon extends past the last change point");
  }
  for (const auto& e : events.events()) {
    if (e.time > grid_.horizon()) throw DomainError("event time past the last change point");
  }
}

void Objective::check(const ModelState& state) const {
  if (state.variant != variant_) {
    throw VariantMismatch(std::string("objective built for the ") + to_string(variant_) +
                          " variant but given a " + to_string(state.variant) + " state");
  }
  if (state.trajectories.num_nodes() != dyads_.num_nodes()) {
    throw DomainError("state node count does not match the event list");
  }
  if (state.trajectories.num_knots() != grid_.size()) {
    throw DomainError("state knot count does not match the grid");
  }
}

ObjectiveParts Objective::parts(const ModelState& state) const {
  check(state);
  ObjectiveParts out;
  if (variant_ == Variant::distance) {
    out.loglik = distance::loglik(state, grid_, dyads_);
    out.penalty = penalties::distance(state.trajectories, grid_, penalty_);
  } else {
    out.loglik = projection::loglik(state, grid_, dyads_);
    out.penalty = penalties::projection(state.trajectories, grid_, penalty_);
  }
  return out;
}

double Objective::node_term(const ModelState& state, NodeId i) const {
  check(state);
  if (i >= num_nodes()) throw DomainError("node id out of range");
  LoglikParts dyadic;
  for (NodeId j = 0; j < num_nodes(); ++j) {
    if (j == i) continue;
    const NodeId a = std::min(i, j), b = std::max(i, j);
    if (variant_ == Variant::distance) {
      distance::dyad_loglik(state, grid_, a, b, dyads_.times(a, b), dyadic);
    } else {
      projection::dyad_loglik(state, grid_, a, b, dyads_.times(a, b), dyadic);
    }
  }
  const double own_penalty =
      variant_ == Variant::distance
          ? penalties::distance_node(state.trajectories, grid_, penalty_, i)
          : penalties::projection_node(state.trajectories, grid_, penalty_, i);
  return 0.5 * dyadic.total() + own_penalty;
}

void Objective::dyad_gradient(const ModelState& state, NodeId i, NodeId j, double weight,
                              Gradient& grad) const {
  const NodeId a = std::min(i, j), b = std::max(i, j);
  if (variant_ == Variant::distance) {
    distance::dyad_gradient(state, grid_, a, b, dyads_.times(a, b), weight, grad);
  } else {
    projection::dyad_gradient(state, grid_, a, b, dyads_.times(a, b), weight, grad);
  }
}

void Objective::penalty_gradient(const ModelState& state, NodeId i, double weight,
                                 Gradient& grad) const {
  if (variant_ == Variant::distance) {
    penalties::distance_node_gradient(state.trajectories, grid_, penalty_, i, weight, grad);
  } else {
    penalties::projection_node_gradient(state.trajectories, grid_, penalty_, i, weight, grad);
  }
}

void Objective::to_free_parameters(const ModelState& state, Gradient& grad) const {
  if (variant_ != Variant::projection) return;
  grad.beta = 0.0;
  // dz/dw of softplus is the logistic sigmoid, which equals 1 - e^{-z}.
  const auto& z = state.trajectories.values();
  for (std::size_t k = 0; k < z.size(); ++k) grad.positions[k] *= -std::expm1(-z[k]);
}

Gradient Objective::gradient(const ModelState& state) const {
  check(state);
  Gradient grad(state.trajectories.values().size());
  const std::size_t n = num_nodes();
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) dyad_gradient(state, i, j, 1.0, grad);
  }
  for (NodeId i = 0; i < n; ++i) penalty_gradient(state, i, 1.0, grad);
  to_free_parameters(state, grad);
  return grad;
}

Gradient Objective::node_gradient(const ModelState& state, NodeId i) const {
  check(state);
  if (i >= num_nodes()) throw DomainError("node id out of range");
  Gradient grad(state.trajectories.values().size());
  for (NodeId j = 0; j < num_nodes(); ++j) {
    if (j != i) dyad_gradient(state, i, j, 0.5, grad);
  }
  penalty_gradient(state, i, 1.0, grad);
  to_free_parameters(state, grad);
  return grad;
}

Gradient Objective::minibatch_gradient(const ModelState& state,
                                       std::span<const NodeId> batch) const {
  check(state);
  if (batch.empty()) throw DomainError("minibatch must contain at least one node");
  const double scale = static_cast<double>(num_nodes()) / static_cast<double>(batch.size());
  Gradient grad(state.trajectories.values().size());
  for (NodeId i : batch) {
    if (i >= num_nodes()) throw DomainError("node id out of range");
    for (NodeId j = 0; j < num_nodes(); ++j) {
      if (j != i) dyad_gradient(state, i, j, 0.5 * scale, grad);
    }
    penalty_gradient(state, i, scale, grad);
  }
  to_free_parameters(state, grad);
  return grad;
}

double objective(const ModelState& state, const ChangePointGrid& grid, const EventList& events,
                 const PenaltyParams& penalty) {
  return Objective(events, grid, state.variant, penalty).value(state);
}

double node_term(const ModelState& state, const ChangePointGrid& grid, const EventList& events,
                 const PenaltyParams& penalty, NodeId i) {
  return Objective(events, grid, state.variant, penalty).node_term(state, i);
}

Gradient gradient(const ModelState& state, const ChangePointGrid& grid, const EventList& events,
                  const PenaltyParams& penalty) {
  return Objective(events, grid, state.variant, penalty).gradient(state);
}

Gradient minibatch_gradient_estimate(const ModelState& state, const ChangePointGrid& grid,
                                     const EventList& events, const PenaltyParams& penalty,
                                     std::span<const NodeId> batch) {
  return Objective(events, grid, state.variant, penalty).minibatch_gradient(state, batch);
}

std::vector<double> pack_parameters(const ModelState& state) {
  const auto& z = state.trajectories.values();
  std::vector<double> params;
  if (state.variant == Variant::distance) {
    params.reserve(z.size() + 1);
    params.push_back(state.beta);
    params.insert(params.end(), z.begin(), z.end());
  } else {
    params.reserve(z.size());
    for (double v : z) params.push_back(softplus_inverse(v));
  }
  return params;
}

void unpack_parameters(std::span<const double> params, ModelState& state) {
  auto& z = state.trajectories.values();
  if (state.variant == Variant::distance) {
    if (params.size() != z.size() + 1) throw DomainError("parameter vector has the wrong size");
    state.beta = params[0];
    std::copy(params.begin() + 1, params.end(), z.begin());
  } else {
    if (params.size() != z.size()) throw DomainError("parameter vector has the wrong size");
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = softplus(params[k]);
  }
}

std::vector<double> pack_gradient(Variant variant, const Gradient& grad) {
  std::vector<double> out;
  if (variant == Variant::distance) {
    out.reserve(grad.positions.size() + 1);
    out.push_back(grad.beta);
  }
  out.insert(out.end(), grad.positions.begin(), grad.positions.end());
  return out;
}

}  // namespace clpm
