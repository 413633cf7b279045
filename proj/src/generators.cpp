#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace clpm::generators {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Rate of dyad (i, j) at local coordinate u of segment g, without interpolate()'s
// bounds checks.
double local_rate(const ModelState& state, NodeId i, NodeId j, std::size_t g, double u) {
  const auto& traj = state.trajectories;
  const auto zig = traj.at(i, g), zih = traj.at(i, g + 1);
  const auto zjg = traj.at(j, g), zjh = traj.at(j, g + 1);
  double acc = 0.0;
  for (std::size_t c = 0; c < traj.dim(); ++c) {
    const double xi = (1.0 - u) * zig[c] + u * zih[c];
    const double xj = (1.0 - u) * zjg[c] + u * zjh[c];
    acc += state.variant == Variant::distance ? (xi - xj) * (xi - xj) : xi * xj;
  }
  return state.variant == Variant::distance ? std::exp(state.beta - acc) : std::max(acc, 0.0);
}

// Vertex of the quadratic in u (the exponent or the dot product), if any.
double quadratic_vertex(const ModelState& state, NodeId i, NodeId j, std::size_t g) {
  const auto& traj = state.trajectories;
  const auto zig = traj.at(i, g), zih = traj.at(i, g + 1);
  const auto zjg = traj.at(j, g), zjh = traj.at(j, g + 1);
  double lin = 0.0, quad = 0.0;
  for (std::size_t c = 0; c < traj.dim(); ++c) {
    if (state.variant == Variant::distance) {
      const double a = zig[c] - zjg[c];
      const double b = (zih[c] - zjh[c]) - a;
      lin += 2.0 * a * b;
      quad += b * b;
    } else {
      const double di = zih[c] - zig[c];
      const double dj = zjh[c] - zjg[c];
      lin += zig[c] * dj + di * zjg[c];
      quad += di * dj;
    }
  }
  if (quad == 0.0) return 0.0;
  return -lin / (2.0 * quad);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double BlockSchedule::dyad_mean(std::size_t s, NodeId i, NodeId j) const {
  bool overridden = false;
  double mean = 0.0;
  for (const auto& o : overrides) {
    if (o.node == i || o.node == j) {
      mean = overridden ? std::min(mean, o.mean) : o.mean;
      overridden = true;
    }
  }
  if (overridden) return mean;
  return theta[s][memberships[s][i]][memberships[s][j]];
}

void BlockSchedule::validate() const {
  if (segment_bounds.size() < 2) throw DomainError("block schedule needs at least one segment");
  if (segment_bounds.front() != 0.0) throw DomainError("block schedule must start at 0");
  for (std::size_t s = 1; s < segment_bounds.size(); ++s) {
    if (!(segment_bounds[s] > segment_bounds[s - 1])) {
      throw DomainError("segment bounds must be strictly increasing");
    }
  }
  const std::size_t segments = num_segments();
  if (memberships.size() != segments || theta.size() != segments) {
    throw DomainError("block schedule needs memberships and theta for every segment");
  }
  for (std::size_t s = 0; s < segments; ++s) {
    if (memberships[s].size() != num_nodes) {
      throw DomainError("membership missing for some node");
    }
    for (std::size_t c : memberships[s]) {
      if (c >= theta[s].size()) throw DomainError("membership refers to an unknown cluster");
    }
    for (const auto& row : theta[s]) {
      if (row.size() != theta[s].size()) throw DomainError("theta must be square");
      for (double x : row) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("theta entries must be >= 0");
      }
    }
  }
  for (const auto& o : overrides) {
    if (o.node >= num_nodes || !(o.mean >= 0.0)) throw DomainError("invalid override");
  }
}

EventList simulate_blockmodel(const BlockSchedule& schedule, std::uint64_t seed) {
  schedule.validate();
  const std::size_t n = schedule.num_nodes;
  std::vector<Event> events;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      std::mt19937_64 rng(mix_seed(seed, dyad_index(i, j, n)));
      for (std::size_t s = 0; s < schedule.num_segments(); ++s) {
        const double mean = schedule.dyad_mean(s, i, j);
        if (mean <= 0.0) continue;
        const int count = std::poisson_distribution<int>(mean)(rng);
        std::uniform_real_distribution<double> when(schedule.segment_bounds[s],
                                                    schedule.segment_bounds[s + 1]);
        for (int e = 0; e < count; ++e) events.push_back({when(rng), i, j});
      }
    }
  }
  return EventList(std::move(events), schedule.horizon(), n);
}

std::size_t sim1_community(std::size_t segment, NodeId node) {
  switch (segment) {
    case 1:
      return node / 20;
    case 2:
      // Nodes 0-9 rejoin nodes 20-39; nodes 10-19 join nodes 40-59.
      if (node < 10) return 0;
      if (node < 20) return 1;
      return node < 40 ? 0 : 1;
    default:
      return 0;
  }
}

BlockSchedule make_sim1_schedule() {
  BlockSchedule sched;
  sched.num_nodes = 60;
  sched.segment_bounds = {0.0, 10.0, 20.0, 30.0, 40.0};
  sched.memberships.resize(4, std::vector<std::size_t>(60, 0));
  for (std::size_t s = 0; s < 4; ++s) {
    for (NodeId i = 0; i < 60; ++i) sched.memberships[s][i] = sim1_community(s, i);
  }
  sched.theta = {
      {{1.0}},
      {{10.0, 1.0, 1.0}, {1.0, 5.0, 1.0}, {1.0, 1.0, 1.0}},
      {{5.0, 1.0}, {1.0, 5.0}},
      {{1.0}},
  };
  sched.overrides = {{kSim1Hub, 10.0}, {kSim1Isolated, 0.01}};
  return sched;
}

BlockSchedule make_sim2_schedule(const Sim2Options& options) {
  if (options.num_nodes < 4 || options.num_segments < 2) {
    throw DomainError("sim2 needs at least 4 nodes and 2 segments");
  }
  if (options.switching_node >= options.num_nodes / 2) {
    throw DomainError("the switching node must start in the first community");
  }
  BlockSchedule sched;
  sched.num_nodes = options.num_nodes;
  const std::size_t segments = options.num_segments;
  const double width = options.horizon / static_cast<double>(segments);
  for (std::size_t s = 0; s <= segments; ++s) {
    sched.segment_bounds.push_back(width * static_cast<double>(s));
  }
  sched.segment_bounds.back() = options.horizon;
  for (std::size_t s = 0; s < segments; ++s) {
    std::vector<std::size_t> members(options.num_nodes);
    for (NodeId i = 0; i < options.num_nodes; ++i) members[i] = i < options.num_nodes / 2 ? 0 : 1;
    const double mid = 0.5 * (sched.segment_bounds[s] + sched.segment_bounds[s + 1]);
    if (mid >= options.switch_time) members[options.switching_node] = 1;
    sched.memberships.push_back(std::move(members));
    const double frac = static_cast<double>(s) / static_cast<double>(segments - 1);
    const double within = options.within_start + (options.within_end - options.within_start) * frac;
    sched.theta.push_back({{within, options.between}, {options.between, within}});
  }
  return sched;
}

RingScenario make_ring_trajectories(std::size_t n, double radius, double period) {
  if (n < 2) throw DomainError("the ring scenario needs at least two nodes");
  RingScenario ring{TrajectorySet(n, 3, 2), ChangePointGrid({0.0, 0.5 * period, period})};
  for (NodeId k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t knot : {std::size_t{0}, std::size_t{2}}) {
      auto z = ring.trajectories.at(k, knot);
      z[0] = radius * std::cos(angle);
      z[1] = radius * std::sin(angle);
    }
  }
  return ring;
}

double segment_rate_bound(const ModelState& state, const ChangePointGrid& grid, NodeId i,
                          NodeId j, std::size_t g) {
  if (g >= grid.num_segments()) throw DomainError("segment index out of range");
  double bound = std::max(local_rate(state, i, j, g, 0.0), local_rate(state, i, j, g, 1.0));
  const double vertex = quadratic_vertex(state, i, j, g);
  if (vertex > 0.0 && vertex < 1.0) bound = std::max(bound, local_rate(state, i, j, g, vertex));
  return bound;
}

EventList simulate_clpm(const ModelState& state, const ChangePointGrid& grid, std::uint64_t seed) {
  state.validate(grid);
  const std::size_t n = state.trajectories.num_nodes();
  std::vector<Event> events;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      std::mt19937_64 rng(mix_seed(seed, dyad_index(i, j, n)));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (std::size_t g = 0; g < grid.num_segments(); ++g) {
        // Tiny inflation keeps the bound dominant under rounding at the argmax.
        const double bound = segment_rate_bound(state, grid, i, j, g) * (1.0 + 1e-12);
        const double len = grid.length(g);
        if (!(bound * len > 0.0)) continue;
        const auto candidates = std::poisson_distribution<long>(bound * len)(rng);
        for (long c = 0; c < candidates; ++c) {
          const double u = unit(rng);
          const double accept = unit(rng);
          if (accept * bound < local_rate(state, i, j, g, u)) {
            events.push_back({std::min(grid[g] + u * len, grid.horizon()), i, j});
          }
        }
      }
    }
  }
  return EventList(std::move(events), grid.horizon(), n);
}

}  // namespace clpm::generators
