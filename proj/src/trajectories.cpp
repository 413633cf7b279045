#include "trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace clpm {

EventList::EventList(std::vector<Event> events, double horizon, std::size_t num_nodes,
                     std::vector<std::string> labels)
    : events_(std::move(events)), horizon_(horizon), num_nodes_(num_nodes),
      labels_(std::move(labels)) {
  if (!(horizon_ >= 0.0) || !std::isfinite(horizon_)) {
    throw DomainError("event horizon must be a finite nonnegative time");
  }
  if (labels_.empty()) {
    labels_.reserve(num_nodes_);
    for (std::size_t i = 0; i < num_nodes_; ++i) labels_.push_back(std::to_string(i));
  } else if (labels_.size() != num_nodes_) {
    throw DomainError("label count does not match node count");
  }
  for (auto& e : events_) {
    if (e.a == e.b) {
      throw DomainError("self-loop on node " + std::to_string(e.a));
    }
    if (e.a >= num_nodes_ || e.b >= num_nodes_) {
      throw DomainError("node id out of range");
    }
    if (!(e.time >= 0.0 && e.time <= horizon_)) {
      std::ostringstream msg;
      msg << "event time " << e.time << " outside [0, " << horizon_ << "]";
      throw DomainError(msg.str());
    }
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::stable_sort(events_.begin(), events_.end(),
                   [](const Event& x, const Event& y) { return x.time < y.time; });
}

ChangePointGrid::ChangePointGrid(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw DomainError("a change-point grid needs at least 2 knots");
  if (knots_.front() != 0.0) throw DomainError("the first change point must be 0");
  for (std::size_t k = 1; k < knots_.size(); ++k) {
    if (!(knots_[k] > knots_[k - 1]) || !std::isfinite(knots_[k])) {
      throw DomainError("change points must be finite and strictly increasing");
    }
  }
}

ChangePointGrid ChangePointGrid::uniform(double start, double end, std::size_t num_knots) {
  if (num_knots < 2) throw DomainError("a change-point grid needs at least 2 knots");
  std::vector<double> knots(num_knots);
  const double step = (end - start) / static_cast<double>(num_knots - 1);
  for (std::size_t k = 0; k < num_knots; ++k) knots[k] = start + step * static_cast<double>(k);
  knots.back() = end;
  return ChangePointGrid(std::move(knots));
}

std::size_t locate_segment(const ChangePointGrid& grid, double t) {
  const auto& knots = grid.knots();
  if (!(t >= knots.front() && t <= knots.back())) {
    std::ostringstream msg;
    msg << "time " << t << " outside [0, " << knots.back() << "]";
    throw DomainError(msg.str());
  }
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  auto g = static_cast<std::size_t>(it - knots.begin());
  // upper_bound gives the first knot > t; the segment starts one before it.
  if (g >= knots.size()) return knots.size() - 2;
  return g - 1;
}

TrajectorySet::TrajectorySet(std::size_t num_nodes, std::size_t num_knots, std::size_t dim)
    : num_nodes_(num_nodes), num_knots_(num_knots), dim_(dim),
      values_(num_nodes * num_knots * dim, 0.0) {
  if (dim_ == 0) throw DomainError("latent dimension must be at least 1");
}

TrajectorySet::TrajectorySet(std::size_t num_nodes, std::size_t num_knots, std::size_t dim,
                             std::vector<double> values)
    : num_nodes_(num_nodes), num_knots_(num_knots), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw DomainError("latent dimension must be at least 1");
  if (values_.size() != num_nodes_ * num_knots_ * dim_) {
    throw DomainError("trajectory value count does not match N x K x d");
  }
}

bool TrajectorySet::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool TrajectorySet::all_positive() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

const char* to_string(Variant v) {
  return v == Variant::projection ? "projection" : "distance";
}

Variant variant_from_string(const std::string& name) {
  if (name == "projection") return Variant::projection;
  if (name == "distance") return Variant::distance;
  throw DomainError("unknown model variant '" + name + "'");
}

void ModelState::validate(const ChangePointGrid& grid) const {
  if (trajectories.num_knots() != grid.size()) {
    throw DomainError("trajectory knot count does not match the grid");
  }
  if (!trajectories.all_finite()) throw DomainError("non-finite knot position");
  if (variant == Variant::projection) {
    if (!trajectories.all_positive()) {
      throw DomainError("projection positions must lie in the positive orthant");
    }
    if (beta != 0.0) throw DomainError("the projection variant has no intercept");
  } else if (!std::isfinite(beta)) {
    throw DomainError("non-finite intercept");
  }
}

void interpolate_in_segment(const TrajectorySet& traj, const ChangePointGrid& grid,
                            NodeId node, std::size_t g, double t, std::span<double> out) {
  const double u = local_coordinate(grid, g, t);
  auto lo = traj.at(node, g);
  auto hi = traj.at(node, g + 1);
  for (std::size_t c = 0; c < traj.dim(); ++c) out[c] = (1.0 - u) * lo[c] + u * hi[c];
}

std::vector<double> interpolate(const TrajectorySet& traj, const ChangePointGrid& grid,
                                NodeId node, double t) {
  if (node >= traj.num_nodes()) throw DomainError("node id out of range");
  const std::size_t g = locate_segment(grid, t);
  std::vector<double> out(traj.dim());
  interpolate_in_segment(traj, grid, node, g, t, out);
  return out;
}

std::vector<DyadEvents> events_by_dyad(const EventList& events) {
  std::map<std::pair<NodeId, NodeId>, std::vector<double>> grouped;
  for (const auto& e : events.events()) grouped[{e.a, e.b}].push_back(e.time);
  std::vector<DyadEvents> out;
  out.reserve(grouped.size());
  for (auto& [key, times] : grouped) out.push_back({key.first, key.second, std::move(times)});
  return out;
}

}  // namespace clpm
