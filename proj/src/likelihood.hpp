#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trajectories.hpp"

namespace clpm {

/// Event times grouped per unordered pair, stored CSR-style over all
/// N(N-1)/2 dyads so lookups are O(1).
class DyadTable {
 public:
  DyadTable() = default;
  explicit DyadTable(const EventList& events);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t total_events() const { return times_.size(); }
  std::size_t num_dyads() const { return start_.empty() ? 0 : start_.size() - 1; }

  /// Sorted event times of the dyad {a, b}; order of a and b does not matter.
  std::span<const double> times(NodeId a, NodeId b) const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> start_;
  std::vector<double> times_;
};

/// An event whose projection rate fell below the log floor.
struct RateFloorHit {
  NodeId a = 0;
  NodeId b = 0;
  double time = 0.0;
  double rate = 0.0;
};

/// Log-likelihood split into the event sum and the compensator (integral) sum.
struct LoglikParts {
  double event_term = 0.0;
  double integral_term = 0.0;
  std::vector<RateFloorHit> floor_hits;

  double total() const { return event_term - integral_term; }
};

/// Gradient buffer over (beta, knot coordinates), laid out like TrajectorySet.
struct Gradient {
  double beta = 0.0;
  std::vector<double> positions;

  explicit Gradient(std::size_t n = 0) : positions(n, 0.0) {}
};

}  // namespace clpm
