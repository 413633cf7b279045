#pragma once

#include <span>

#include "likelihood.hpp"
#include "trajectories.hpp"

// Distance variant: log rate(t) = beta - |z_i(t) - z_j(t)|^2.
namespace clpm::distance {

/// Below this squared relative displacement a segment is treated as degenerate
/// and integrated by Gauss-Legendre quadrature instead of the Gaussian closed form.
inline constexpr double kDegenerateThreshold = 1e-8;

/// Gaussian form of the exponent on one segment, in the local coordinate u:
///   -|a + u b|^2 = -offset - (u - mu)^2 / (2 sigma^2),
/// where a = z_i(g) - z_j(g) and b = (Delta_i - Delta_j).
struct SegmentGaussianParams {
  double mu = 0.0;
  double sigma = 0.0;
  double offset = 0.0;         // squared distance from the origin to the line a + u b
  double delta_norm_sq = 0.0;  // |b|^2
  bool degenerate = false;     // mu and sigma undefined (NaN) when set
};

SegmentGaussianParams segment_params(const ModelState& state, const ChangePointGrid& grid,
                                     NodeId i, NodeId j, std::size_t g);

double rate(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j, double t);

/// Exact integral of the rate over segment g.
double segment_integral(const ModelState& state, const ChangePointGrid& grid, NodeId i,
                        NodeId j, std::size_t g);

/// Exact integral of the rate over [0, T].
double integral(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j);

/// Moments  m_k = e^beta * int_0^1 u^k exp(-|a + u b|^2) du  for k = 0, 1, 2,
/// with a = difference at the segment start and c = a + b at its end.
struct SegmentMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};
SegmentMoments segment_moments(std::span<const double> a, std::span<const double> c, double beta);

void dyad_loglik(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j,
                 std::span<const double> times, LoglikParts& parts);

/// Adds weight * d(dyad loglik)/d(beta, z) into grad.
void dyad_gradient(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j,
                   std::span<const double> times, double weight, Gradient& grad);

LoglikParts loglik(const ModelState& state, const ChangePointGrid& grid, const DyadTable& dyads);
LoglikParts loglik(const ModelState& state, const ChangePointGrid& grid, const EventList& events);

}  // namespace clpm::distance
