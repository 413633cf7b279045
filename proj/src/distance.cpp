#include "distance.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "normal.hpp"

namespace clpm::distance {

namespace {

// 5-point Gauss-Legendre rule mapped to [0, 1].
constexpr std::array<double, 5> kGaussNodes = {
    0.5 * (1.0 - 0.90617984593866399280), 0.5 * (1.0 - 0.53846931010568309104), 0.5,
    0.5 * (1.0 + 0.53846931010568309104), 0.5 * (1.0 + 0.90617984593866399280)};
constexpr std::array<double, 5> kGaussWeights = {
    0.5 * 0.23692688505618908751, 0.5 * 0.47862867049936646804, 0.5 * 0.56888888888888888889,
    0.5 * 0.47862867049936646804, 0.5 * 0.23692688505618908751};

void require_distance(const ModelState& state) {
  if (state.variant != Variant::distance) {
    throw VariantMismatch("distance likelihood called on a projection-model state");
  }
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// a = z_i(g) - z_j(g), c = z_i(g+1) - z_j(g+1)
void segment_differences(const TrajectorySet& traj, NodeId i, NodeId j, std::size_t g,
                         std::span<double> a, std::span<double> c) {
  const auto zig = traj.at(i, g), zih = traj.at(i, g + 1);
  const auto zjg = traj.at(j, g), zjh = traj.at(j, g + 1);
  for (std::size_t k = 0; k < traj.dim(); ++k) {
    a[k] = zig[k] - zjg[k];
    c[k] = zih[k] - zjh[k];
  }
}

SegmentGaussianParams gaussian_params(std::span<const double> a, std::span<const double> c) {
  SegmentGaussianParams p;
  double ab = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double b = c[k] - a[k];
    p.delta_norm_sq += b * b;
    ab += a[k] * b;
  }
  if (p.delta_norm_sq < kDegenerateThreshold) {
    p.degenerate = true;
    p.mu = p.sigma = std::numeric_limits<double>::quiet_NaN();
    p.offset = squared_norm(a);
    return p;
  }
  p.mu = -ab / p.delta_norm_sq;
  p.sigma = 1.0 / (normal::kSqrt2 * std::sqrt(p.delta_norm_sq));
  // |a + mu b|^2 is the same quantity as |a|^2 - (|b| mu)^2 but cannot go negative.
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double r = a[k] + p.mu * (c[k] - a[k]);
    p.offset += r * r;
  }
  return p;
}

}  // namespace

SegmentGaussianParams segment_params(const ModelState& state, const ChangePointGrid& grid,
                                     NodeId i, NodeId j, std::size_t g) {
  require_distance(state);
  if (g >= grid.num_segments()) throw DomainError("segment index out of range");
  const std::size_t d = state.trajectories.dim();
  std::vector<double> a(d), c(d);
  segment_differences(state.trajectories, i, j, g, a, c);
  return gaussian_params(a, c);
}

SegmentMoments segment_moments(std::span<const double> a, std::span<const double> c,
                               double beta) {
  const auto p = gaussian_params(a, c);
  SegmentMoments m;
  if (p.degenerate) {
    // Nearly constant integrand: quadrature of the exact exponent.
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
      const double u = kGaussNodes[q];
      double dist_sq = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double v = a[k] + u * (c[k] - a[k]);
        dist_sq += v * v;
      }
      const double w = kGaussWeights[q] * std::exp(beta - dist_sq);
      m.m0 += w;
      m.m1 += w * u;
      m.m2 += w * u * u;
    }
    return m;
  }
  const double mu = p.mu;
  const double sigma = p.sigma;
  const double var = sigma * sigma;
  const double log_m0 = beta - p.offset + std::log(normal::kSqrt2Pi * sigma) +
                        normal::log_cdf_diff((1.0 - mu) / sigma, -mu / sigma);
  m.m0 = std::exp(log_m0);
  // Endpoint values of the integrand; e^{-offset} * rho(u) is exactly exp(-|a + u b|^2).
  const double e0 = std::exp(beta - squared_norm(a));
  const double e1 = std::exp(beta - squared_norm(c));
  m.m1 = mu * m.m0 + var * (e0 - e1);
  m.m2 = var * (m.m0 - (1.0 - mu) * e1 - mu * e0) + 2.0 * mu * var * (e0 - e1) + mu * mu * m.m0;
  return m;
}

double rate(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j, double t) {
  require_distance(state);
  const auto zi = interpolate(state.trajectories, grid, i, t);
  const auto zj = interpolate(state.trajectories, grid, j, t);
  double dist_sq = 0.0;
  for (std::size_t k = 0; k < zi.size(); ++k) dist_sq += (zi[k] - zj[k]) * (zi[k] - zj[k]);
  return std::exp(state.beta - dist_sq);
}

double segment_integral(const ModelState& state, const ChangePointGrid& grid, NodeId i,
                        NodeId j, std::size_t g) {
  require_distance(state);
  const std::size_t d = state.trajectories.dim();
  std::vector<double> a(d), c(d);
  segment_differences(state.trajectories, i, j, g, a, c);
  return grid.length(g) * segment_moments(a, c, state.beta).m0;
}

double integral(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j) {
  require_distance(state);
  double total = 0.0;
  for (std::size_t g = 0; g < grid.num_segments(); ++g) {
    total += segment_integral(state, grid, i, j, g);
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
    double dist_sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) dist_sq += (zi[k] - zj[k]) * (zi[k] - zj[k]);
    events += state.beta - dist_sq;
  }
  parts.event_term += events;
  parts.integral_term += integral(state, grid, i, j);
}

void dyad_gradient(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j,
                   std::span<const double> times, double weight, Gradient& grad) {
  const auto& traj = state.trajectories;
  const std::size_t d = traj.dim();
  std::vector<double> a(d), c(d), diff(d);

  for (double t : times) {
    const std::size_t g = locate_segment(grid, t);
    const double u = local_coordinate(grid, g, t);
    segment_differences(traj, i, j, g, a, c);
    double* gi0 = grad.positions.data() + traj.offset(i, g);
    double* gi1 = grad.positions.data() + traj.offset(i, g + 1);
    double* gj0 = grad.positions.data() + traj.offset(j, g);
    double* gj1 = grad.positions.data() + traj.offset(j, g + 1);
    for (std::size_t k = 0; k < d; ++k) {
      const double v = (1.0 - u) * a[k] + u * c[k];
      const double s0 = -2.0 * weight * (1.0 - u) * v;
      const double s1 = -2.0 * weight * u * v;
      gi0[k] += s0;
      gi1[k] += s1;
      gj0[k] -= s0;
      gj1[k] -= s1;
    }
  }
  grad.beta += weight * static_cast<double>(times.size());

  for (std::size_t g = 0; g < grid.num_segments(); ++g) {
    segment_differences(traj, i, j, g, a, c);
    const auto m = segment_moments(a, c, state.beta);
    const double len = grid.length(g);
    grad.beta -= weight * len * m.m0;
    double* gi0 = grad.positions.data() + traj.offset(i, g);
    double* gi1 = grad.positions.data() + traj.offset(i, g + 1);
    double* gj0 = grad.positions.data() + traj.offset(j, g);
    double* gj1 = grad.positions.data() + traj.offset(j, g + 1);
    const double s = 2.0 * weight * len;
    for (std::size_t k = 0; k < d; ++k) {
      const double b = c[k] - a[k];
      // -d/da and -d/dc of len * int exp(beta - |a + u b|^2) du
      const double da = s * (a[k] * (m.m0 - m.m1) + b * (m.m1 - m.m2));
      const double dc = s * (a[k] * m.m1 + b * m.m2);
      gi0[k] += da;
      gi1[k] += dc;
      gj0[k] -= da;
      gj1[k] -= dc;
    }
  }
}

LoglikParts loglik(const ModelState& state, const ChangePointGrid& grid, const DyadTable& dyads) {
  require_distance(state);
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

}  // namespace clpm::distance
