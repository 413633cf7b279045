#include "projection.hpp"

#include <cmath>
#include <vector>

namespace clpm::projection {

namespace {

void require_projection(const ModelState& state) {
  if (state.variant != Variant::projection) {
    throw VariantMismatch("projection likelihood called on a distance-model state");
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) s += x[c] * y[c];
  return s;
}

}  // namespace

DotProductTable dot_products(const TrajectorySet& traj, NodeId i, NodeId j, std::size_t g) {
  const auto zig = traj.at(i, g), zih = traj.at(i, g + 1);
  const auto zjg = traj.at(j, g), zjh = traj.at(j, g + 1);
  return {dot(zig, zjg), dot(zig, zjh), dot(zih, zjg), dot(zih, zjh)};
}

double rate(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j, double t) {
  require_projection(state);
  const auto zi = interpolate(state.trajectories, grid, i, t);
  const auto zj = interpolate(state.trajectories, grid, j, t);
  return dot(zi, zj);
}

double integral(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j) {
  require_projection(state);
  double total = 0.0;
  for (std::size_t g = 0; g < grid.num_segments(); ++g) {
    const auto s = dot_products(state.trajectories, i, j, g);
    total += grid.length(g) * (2.0 * s.gg + s.gh + s.hg + 2.0 * s.hh) / 6.0;
  }
  return total;
}

void dyad_loglik(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j,
                 std::span<const double> times, LoglikParts& parts) {
  const auto& traj = state.trajectories;
  const std::size_t d = traj.dim();
  std::vector<double> zi(d), zj(d);
  double events = 0.0;
  for (double t : times) {
    const std::size_t g = locate_segment(grid, t);
    interpolate_in_segment(traj, grid, i, g, t, zi);
    interpolate_in_segment(traj, grid, j, g, t, zj);
    const double r = dot(zi, zj);
    if (!(r > kRateFloor)) {
      parts.floor_hits.push_back({i, j, t, r});
      events += std::log(kRateFloor);
    } else {
      events += std::log(r);
    }
  }
  parts.event_term += events;
  parts.integral_term += integral(state, grid, i, j);
}

void dyad_gradient(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j,
                   std::span<const double> times, double weight, Gradient& grad) {
  const auto& traj = state.trajectories;
  const std::size_t d = traj.dim();
  std::vector<double> zi(d), zj(d);

  for (double t : times) {
    const std::size_t g = locate_segment(grid, t);
    const double u = local_coordinate(grid, g, t);
    interpolate_in_segment(traj, grid, i, g, t, zi);
    interpolate_in_segment(traj, grid, j, g, t, zj);
    const double r = dot(zi, zj);
    if (!(r > kRateFloor)) continue;  // floored: locally constant
    const double s = weight / r;
    double* gi0 = grad.positions.data() + traj.offset(i, g);
    double* gi1 = grad.positions.data() + traj.offset(i, g + 1);
    double* gj0 = grad.positions.data() + traj.offset(j, g);
    double* gj1 = grad.positions.data() + traj.offset(j, g + 1);
    for (std::size_t c = 0; c < d; ++c) {
      gi0[c] += s * (1.0 - u) * zj[c];
      gi1[c] += s * u * zj[c];
      gj0[c] += s * (1.0 - u) * zi[c];
      gj1[c] += s * u * zi[c];
    }
  }

  // d/dz of L * (2 S^gg + S^gh + S^hg + 2 S^hh) / 6
  for (std::size_t g = 0; g < grid.num_segments(); ++g) {
    const double s = weight * grid.length(g) / 6.0;
    const auto zig = traj.at(i, g), zih = traj.at(i, g + 1);
    const auto zjg = traj.at(j, g), zjh = traj.at(j, g + 1);
    double* gi0 = grad.positions.data() + traj.offset(i, g);
    double* gi1 = grad.positions.data() + traj.offset(i, g + 1);
    double* gj0 = grad.positions.data() + traj.offset(j, g);
    double* gj1 = grad.positions.data() + traj.offset(j, g + 1);
    for (std::size_t c = 0; c < d; ++c) {
      gi0[c] -= s * (2.0 * zjg[c] + zjh[c]);
      gi1[c] -= s * (zjg[c] + 2.0 * zjh[c]);
      gj0[c] -= s * (2.0 * zig[c] + zih[c]);
      gj1[c] -= s * (zig[c] + 2.0 * zih[c]);
    }
  }
}

LoglikParts loglik(const ModelState& state, const ChangePointGrid& grid, const DyadTable& dyads) {
  require_projection(state);
  LoglikParts parts;
  const std::size_t n = state.trajectories.num_nodes();
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) dyad_loglik(state, grid, i, j, dyads.times(i, j), parts);
  }
  return parts;
}

LoglikParts loglik(const ModelState& state, const ChangePointGrid& grid, const EventList& events) {
  return loglik(state, grid, DyadTable(events));
}

}  // namespace clpm::projection
