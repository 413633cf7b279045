#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clpm {

using NodeId = std::uint32_t;

/// Raised when a time or argument lies outside the domain an operation accepts.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an operation for one model variant is handed a state of the other.
class VariantMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Event {
  double time = 0.0;
  NodeId a = 0;  // a < b after canonicalization
  NodeId b = 0;
};

/// Undirected, self-loop free interactions on [0, horizon], sorted by time.
class EventList {
 public:
  EventList() = default;

  /// Canonicalizes each pair to (min, max), sorts by time and validates.
  /// An empty `labels` means labels "0".."N-1".
  EventList(std::vector<Event> events, double horizon, std::size_t num_nodes,
            std::vector<std::string> labels = {});

  const std::vector<Event>& events() const { return events_; }
  double horizon() const { return horizon_; }
  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<Event> events_;
  double horizon_ = 0.0;
  std::size_t num_nodes_ = 0;
  std::vector<std::string> labels_;
};

/// Shared change points 0 = knots[0] < ... < knots[K-1] = T.
class ChangePointGrid {
 public:
  ChangePointGrid() = default;
  explicit ChangePointGrid(std::vector<double> knots);

  /// K knots spaced uniformly on [start, end].
  static ChangePointGrid uniform(double start, double end, std::size_t num_knots);

  std::size_t size() const { return knots_.size(); }
  std::size_t num_segments() const { return knots_.size() - 1; }
  double horizon() const { return knots_.back(); }
  double operator[](std::size_t k) const { return knots_[k]; }
  double length(std::size_t g) const { return knots_[g + 1] - knots_[g]; }
  const std::vector<double>& knots() const { return knots_; }

 private:
  std::vector<double> knots_;
};

/// Segment g with knots[g] <= t < knots[g+1]; t == T maps to the last segment.
std::size_t locate_segment(const ChangePointGrid& grid, double t);

/// Local coordinate u in [0,1] of t within segment g.
inline double local_coordinate(const ChangePointGrid& grid, std::size_t g, double t) {
  return (t - grid[g]) / grid.length(g);
}

/// Knot positions, row-major N x K x d.
class TrajectorySet {
 public:
  TrajectorySet() = default;
  TrajectorySet(std::size_t num_nodes, std::size_t num_knots, std::size_t dim = 2);
  TrajectorySet(std::size_t num_nodes, std::size_t num_knots, std::size_t dim,
                std::vector<double> values);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_knots() const { return num_knots_; }
  std::size_t dim() const { return dim_; }

  std::span<double> at(std::size_t node, std::size_t knot) {
    return {values_.data() + offset(node, knot), dim_};
  }
  std::span<const double> at(std::size_t node, std::size_t knot) const {
    return {values_.data() + offset(node, knot), dim_};
  }

  std::size_t offset(std::size_t node, std::size_t knot) const {
    return (node * num_knots_ + knot) * dim_;
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const;
  bool all_positive() const;

 private:
  std::size_t num_nodes_ = 0;
  std::size_t num_knots_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

enum class Variant { projection, distance };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct ModelState {
  Variant variant = Variant::distance;
  TrajectorySet trajectories;
  double beta = 0.0;  // unused (and kept at 0) for the projection variant

  /// Checks shape against the grid, finiteness, and orthant constraint.
  void validate(const ChangePointGrid& grid) const;
};

/// Position of `node` at time t by linear interpolation between knots.
std::vector<double> interpolate(const TrajectorySet& traj, const ChangePointGrid& grid,
                                NodeId node, double t);

/// Same, but with an explicitly chosen segment (t must lie in its closure).
void interpolate_in_segment(const TrajectorySet& traj, const ChangePointGrid& grid,
                            NodeId node, std::size_t g, double t, std::span<double> out);

/// Event times of one unordered pair (a < b).
struct DyadEvents {
  NodeId a = 0;
  NodeId b = 0;
  std::vector<double> times;
};

/// Partition into per-dyad time lists, ordered by (a, b). Dyads without
/// events are omitted.
std::vector<DyadEvents> events_by_dyad(const EventList& events);

/// Index of the dyad (a < b) in the lexicographic enumeration of pairs.
inline std::size_t dyad_index(std::size_t a, std::size_t b, std::size_t n) {
  return a * n - a * (a + 1) / 2 + (b - a - 1);
}

}  // namespace clpm
