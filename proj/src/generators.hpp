#pragma once

#include <cstdint>
#include <vector>

#include "trajectories.hpp"

namespace clpm::generators {

/// Piecewise-constant blockmodel: within segment s the number of events of
/// dyad (i, j) is Poisson with mean theta[s][c_i][c_j], where c = memberships[s].
struct BlockSchedule {
  struct Override {
    NodeId node = 0;
    double mean = 0.0;  // per-segment Poisson mean for every dyad touching `node`
  };

  std::size_t num_nodes = 0;
  std::vector<double> segment_bounds;                       // S + 1 increasing times
  std::vector<std::vector<std::size_t>> memberships;        // [segment][node] -> cluster
  std::vector<std::vector<std::vector<double>>> theta;      // [segment][cluster][cluster]
  std::vector<Override> overrides;

  std::size_t num_segments() const { return segment_bounds.empty() ? 0 : segment_bounds.size() - 1; }
  double horizon() const { return segment_bounds.back(); }

  /// Poisson mean of dyad (i, j) in segment s. When several overrides apply
  /// the smallest mean wins.
  double dyad_mean(std::size_t s, NodeId i, NodeId j) const;

  void validate() const;
};

EventList simulate_blockmodel(const BlockSchedule& schedule, std::uint64_t seed);

/// Four 10-second segments on 60 nodes: uniform mixing, three communities
/// (means 10 / 5 / 1, between 1), community 1 split into the other two
/// (within 5), uniform mixing again. Node 0 is a hub (mean 10 with everyone),
/// node 59 is isolated (mean 0.01).
BlockSchedule make_sim1_schedule();

/// Sim-1 community index of a node in segment s (0-based), ignoring overrides.
std::size_t sim1_community(std::size_t segment, NodeId node);

inline constexpr NodeId kSim1Hub = 0;
inline constexpr NodeId kSim1Isolated = 59;

struct Sim2Options {
  std::size_t num_nodes = 20;
  std::size_t num_segments = 40;
  double horizon = 40.0;
  double within_start = 1.0;
  double within_end = 5.0;
  double between = 1.0;
  NodeId switching_node = 0;  // starts in community 0, joins community 1 at switch_time
  double switch_time = 20.0;
};

/// Two communities (first half / second half of the nodes) whose within-mean
/// steps linearly from within_start to within_end across the unit segments.
BlockSchedule make_sim2_schedule(const Sim2Options& options = {});

struct RingScenario {
  TrajectorySet trajectories;
  ChangePointGrid grid;
};

/// n nodes equally spaced on a circle of `radius` (node k at angle 2 pi k / n),
/// moving linearly to the origin by period / 2 and back by period.
RingScenario make_ring_trajectories(std::size_t n = 20, double radius = 1.0,
                                    double period = 10.0);

/// Upper bound on the rate of dyad (i, j) over segment g, from the rate at the
/// segment ends and at the vertex of the exponent (distance) or dot product
/// (projection) when it lies inside.
double segment_rate_bound(const ModelState& state, const ChangePointGrid& grid, NodeId i,
                          NodeId j, std::size_t g);

/// Exact draw from the model's inhomogeneous Poisson processes by thinning.
/// Node labels default to "0".."N-1".
EventList simulate_clpm(const ModelState& state, const ChangePointGrid& grid, std::uint64_t seed);

/// Seed for dyad-level streams: deterministic mix of a base seed and an index.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace clpm::generators
