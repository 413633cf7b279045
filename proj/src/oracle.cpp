#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "distance.hpp"
#include "gradcheck.hpp"
#include "objective.hpp"
#include "projection.hpp"

namespace clpm::oracle {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, rel_tol);
}

double direct_rate(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j,
                   double t) {
  const auto zi = interpolate(state.trajectories, grid, i, t);
  const auto zj = interpolate(state.trajectories, grid, j, t);
  double acc = 0.0;
  for (std::size_t c = 0; c < zi.size(); ++c) {
    acc += state.variant == Variant::distance ? (zi[c] - zj[c]) * (zi[c] - zj[c])
                                              : zi[c] * zj[c];
  }
  return state.variant == Variant::distance ? std::exp(state.beta - acc) : acc;
}

double rate_integral(const ModelState& state, const ChangePointGrid& grid, NodeId i, NodeId j) {
  double total = 0.0;
  for (std::size_t g = 0; g < grid.num_segments(); ++g) {
    total += integrate([&](double t) { return direct_rate(state, grid, i, j, t); }, grid[g],
                       grid[g + 1]);
  }
  return total;
}

double loglik(const ModelState& state, const ChangePointGrid& grid, const EventList& events) {
  double total = 0.0;
  for (const auto& e : events.events()) {
    total += std::log(direct_rate(state, grid, e.a, e.b, e.time));
  }
  const std::size_t n = state.trajectories.num_nodes();
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) total -= rate_integral(state, grid, i, j);
  }
  return total;
}

double penalty_distance(const TrajectorySet& traj, const ChangePointGrid& grid,
                        const PenaltyParams& params) {
  double total = 0.0;
  for (std::size_t i = 0; i < traj.num_nodes(); ++i) {
    for (std::size_t c = 0; c < traj.dim(); ++c) {
      const double z0 = traj.at(i, 0)[c];
      total -= z0 * z0 / (2.0 * params.sigma0_sq);
      for (std::size_t k = 1; k < traj.num_knots(); ++k) {
        const double step = traj.at(i, k)[c] - traj.at(i, k - 1)[c];
        total -= step * step / (2.0 * (grid[k] - grid[k - 1]) * params.sigma_sq);
      }
    }
  }
  return total;
}

double truncated_normal_log_pdf(double x, double mean, double variance, double lower,
                                double upper) {
  const auto kernel = [&](double y) { return std::exp(-(y - mean) * (y - mean) / (2.0 * variance)); };
  const double mass = integrate(kernel, lower, upper);
  return -(x - mean) * (x - mean) / (2.0 * variance) - std::log(mass);
}

double penalty_projection(const TrajectorySet& traj, const ChangePointGrid& grid,
                          const PenaltyParams& params) {
  double total = 0.0;
  for (std::size_t i = 0; i < traj.num_nodes(); ++i) {
    for (std::size_t k = 0; k + 1 < traj.num_knots(); ++k) {
      const auto lo = traj.at(i, k);
      const auto hi = traj.at(i, k + 1);
      double dot = 0.0, nlo = 0.0, nhi = 0.0;
      for (std::size_t c = 0; c < traj.dim(); ++c) {
        dot += lo[c] * hi[c];
        nlo += lo[c] * lo[c];
        nhi += hi[c] * hi[c];
      }
      const double cosine = std::min(dot / std::sqrt(nlo * nhi), 1.0);
      total += truncated_normal_log_pdf(cosine, params.mu_angle,
                                        (grid[k + 1] - grid[k]) * params.sigma_sq, 0.0, 1.0);
    }
  }
  return total;
}

double objective(const ModelState& state, const ChangePointGrid& grid, const EventList& events,
                 const PenaltyParams& params) {
  const double pen = state.variant == Variant::distance
                         ? penalty_distance(state.trajectories, grid, params)
                         : penalty_projection(state.trajectories, grid, params);
  return loglik(state, grid, events) + pen;
}

RandomInstance random_instance(Variant variant, std::uint64_t seed,
                               const RandomInstanceOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_n(2, options.max_nodes);
  std::uniform_int_distribution<std::size_t> pick_k(2, options.max_knots);
  const std::size_t n = pick_n(rng);
  const std::size_t k = pick_k(rng);
  const double horizon = std::uniform_real_distribution<double>(1.0, 10.0)(rng);

  // Interior knots: sorted uniforms, rejected if two land too close together.
  std::vector<double> knots;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    knots = {0.0};
    for (std::size_t c = 0; c + 2 < k; ++c) knots.push_back(horizon * unit(rng));
    knots.push_back(horizon);
    std::sort(knots.begin(), knots.end());
    bool spaced = true;
    for (std::size_t c = 1; c < knots.size(); ++c) {
      spaced = spaced && knots[c] - knots[c - 1] > 1e-3 * horizon;
    }
    if (spaced) break;
  }

  RandomInstance out{ModelState{}, ChangePointGrid(knots), EventList{}};
  out.state.variant = variant;
  out.state.trajectories = TrajectorySet(n, k, options.dim);
  const double lo = variant == Variant::distance ? -options.coord_bound : 0.05;
  std::uniform_real_distribution<double> coord(lo, options.coord_bound);
  for (double& v : out.state.trajectories.values()) v = coord(rng);
  if (variant == Variant::distance) {
    out.state.beta =
        std::uniform_real_distribution<double>(-options.beta_bound, options.beta_bound)(rng);
  }

  std::vector<Event> events;
  std::uniform_int_distribution<std::size_t> count(0, options.max_events_per_dyad);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const std::size_t m = count(rng);
      for (std::size_t e = 0; e < m; ++e) events.push_back({horizon * unit(rng), i, j});
    }
  }
  out.events = EventList(std::move(events), horizon, n);
  return out;
}

namespace {

double relative(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

std::string describe(double worst, double tol) {
  std::ostringstream msg;
  msg << "max relative error " << worst << " (tolerance " << tol << ")";
  return msg.str();
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed, std::size_t instances) {
  std::vector<CheckResult> results;
  const PenaltyParams penalty{};

  for (Variant variant : {Variant::projection, Variant::distance}) {
    const std::string tag = to_string(variant);

    double worst_integral = 0.0;
    double worst_objective = 0.0;
    double worst_gradient = 0.0;
    double worst_unbiased = 0.0;
    for (std::size_t r = 0; r < instances; ++r) {
      const auto inst = random_instance(variant, seed + 7919 * r + (variant == Variant::distance));
      const auto& st = inst.state;
      const std::size_t n = st.trajectories.num_nodes();
      for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
          const double closed = variant == Variant::distance
                                    ? distance::integral(st, inst.grid, i, j)
                                    : projection::integral(st, inst.grid, i, j);
          worst_integral =
              std::max(worst_integral, relative(closed, rate_integral(st, inst.grid, i, j)));
        }
      }
      const Objective obj(inst.events, inst.grid, variant, penalty);
      worst_objective = std::max(
          worst_objective, relative(obj.value(st), oracle::objective(st, inst.grid, inst.events, penalty)));
      if (r < std::max<std::size_t>(instances / 5, 1)) {
        worst_gradient = std::max(worst_gradient, check_gradient(obj, st).max_relative_error);
      }
      const auto full = pack_gradient(variant, obj.gradient(st));
      std::vector<double> mean(full.size(), 0.0);
      for (NodeId i = 0; i < n; ++i) {
        const auto gi = pack_gradient(variant, obj.node_gradient(st, i));
        for (std::size_t k = 0; k < gi.size(); ++k) mean[k] += gi[k];
      }
      double scale = 0.0, diff = 0.0;
      for (std::size_t k = 0; k < full.size(); ++k) {
        scale = std::max(scale, std::abs(full[k]));
        diff = std::max(diff, std::abs(mean[k] - full[k]));
      }
      worst_unbiased = std::max(worst_unbiased, diff / std::max(scale, 1e-300));
    }
    results.push_back({tag + " integral vs quadrature", worst_integral <= 1e-8,
                       describe(worst_integral, 1e-8)});
    results.push_back({tag + " objective vs direct evaluation", worst_objective <= 1e-8,
                       describe(worst_objective, 1e-8)});
    results.push_back({tag + " gradient vs central differences", worst_gradient <= 1e-5,
                       describe(worst_gradient, 1e-5)});
    results.push_back({tag + " minibatch estimator unbiasedness", worst_unbiased <= 1e-10,
                       describe(worst_unbiased, 1e-10)});
  }
  return results;
}

}  // namespace clpm::oracle
