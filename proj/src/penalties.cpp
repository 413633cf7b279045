#include "penalties.hpp"

#include <algorithm>
#include <cmath>

#include "normal.hpp"

namespace clpm {

void PenaltyParams::validate() const {
  if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) {
    throw DomainError("sigma0_sq must be a positive finite variance");
  }
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
    throw DomainError("sigma_sq must be a positive finite variance");
  }
  if (!(mu_angle >= 0.0 && mu_angle <= 1.0)) throw DomainError("mu_angle must lie in [0, 1]");
}

namespace penalties {

namespace {

struct Cosine {
  double value = 0.0;
  double norm_lo = 0.0;
  double norm_hi = 0.0;
};

Cosine knot_cosine(const TrajectorySet& traj, NodeId i, std::size_t k) {
  const auto lo = traj.at(i, k);
  const auto hi = traj.at(i, k + 1);
  double dot = 0.0, nlo = 0.0, nhi = 0.0;
  for (std::size_t c = 0; c < traj.dim(); ++c) {
    dot += lo[c] * hi[c];
    nlo += lo[c] * lo[c];
    nhi += hi[c] * hi[c];
  }
  if (!(nlo > 0.0) || !(nhi > 0.0)) {
    throw DomainError("zero-norm knot position for node " + std::to_string(i));
  }
  Cosine out;
  out.norm_lo = std::sqrt(nlo);
  out.norm_hi = std::sqrt(nhi);
  out.value = dot / (out.norm_lo * out.norm_hi);
  return out;
}

}  // namespace

double projection_node(const TrajectorySet& traj, const ChangePointGrid& grid,
                       const PenaltyParams& params, NodeId i) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < traj.num_knots(); ++k) {
    // Rounding can push the cosine of parallel vectors a hair past 1.
    const double cos = std::min(knot_cosine(traj, i, k).value, 1.0);
    total += normal::truncated_log_pdf(cos, params.mu_angle, grid.length(k) * params.sigma_sq,
                                       0.0, 1.0);
  }
  return total;
}

double projection(const TrajectorySet& traj, const ChangePointGrid& grid,
                  const PenaltyParams& params) {
  double total = 0.0;
  for (NodeId i = 0; i < traj.num_nodes(); ++i) total += projection_node(traj, grid, params, i);
  return total;
}

double distance_node(const TrajectorySet& traj, const ChangePointGrid& grid,
                     const PenaltyParams& params, NodeId i) {
  const std::size_t d = traj.dim();
  double anchor = 0.0;
  for (double v : traj.at(i, 0)) anchor += v * v;
  double total = -anchor / (2.0 * params.sigma0_sq);
  for (std::size_t k = 1; k < traj.num_knots(); ++k) {
    const auto prev = traj.at(i, k - 1);
    const auto cur = traj.at(i, k);
    double step = 0.0;
    for (std::size_t c = 0; c < d; ++c) step += (cur[c] - prev[c]) * (cur[c] - prev[c]);
    total -= step / (2.0 * grid.length(k - 1) * params.sigma_sq);
  }
  return total;
}

double distance(const TrajectorySet& traj, const ChangePointGrid& grid,
                const PenaltyParams& params) {
  double total = 0.0;
  for (NodeId i = 0; i < traj.num_nodes(); ++i) total += distance_node(traj, grid, params, i);
  return total;
}

void projection_node_gradient(const TrajectorySet& traj, const ChangePointGrid& grid,
                              const PenaltyParams& params, NodeId i, double weight,
                              Gradient& grad) {
  const std::size_t d = traj.dim();
  for (std::size_t k = 0; k + 1 < traj.num_knots(); ++k) {
    const auto cs = knot_cosine(traj, i, k);
    const double var = grid.length(k) * params.sigma_sq;
    const double dlogp = -(std::min(cs.value, 1.0) - params.mu_angle) / var;
    const auto lo = traj.at(i, k);
    const auto hi = traj.at(i, k + 1);
    double* glo = grad.positions.data() + traj.offset(i, k);
    double* ghi = grad.positions.data() + traj.offset(i, k + 1);
    const double inv = 1.0 / (cs.norm_lo * cs.norm_hi);
    for (std::size_t c = 0; c < d; ++c) {
      // d cos / d lo = hi / (|lo||hi|) - cos * lo / |lo|^2, symmetric for hi
      const double dlo = hi[c] * inv - cs.value * lo[c] / (cs.norm_lo * cs.norm_lo);
      const double dhi = lo[c] * inv - cs.value * hi[c] / (cs.norm_hi * cs.norm_hi);
      glo[c] += weight * dlogp * dlo;
      ghi[c] += weight * dlogp * dhi;
    }
  }
}

void distance_node_gradient(const TrajectorySet& traj, const ChangePointGrid& grid,
                            const PenaltyParams& params, NodeId i, double weight,
                            Gradient& grad) {
  const std::size_t d = traj.dim();
  double* g0 = grad.positions.data() + traj.offset(i, 0);
  const auto z0 = traj.at(i, 0);
  for (std::size_t c = 0; c < d; ++c) g0[c] -= weight * z0[c] / params.sigma0_sq;
  for (std::size_t k = 1; k < traj.num_knots(); ++k) {
    const auto prev = traj.at(i, k - 1);
    const auto cur = traj.at(i, k);
    const double scale = weight / (grid.length(k - 1) * params.sigma_sq);
    double* gprev = grad.positions.data() + traj.offset(i, k - 1);
    double* gcur = grad.positions.data() + traj.offset(i, k);
    for (std::size_t c = 0; c < d; ++c) {
      const double step = cur[c] - prev[c];
      gcur[c] -= scale * step;
      gprev[c] += scale * step;
    }
  }
}

}  // namespace penalties
}  // namespace clpm
