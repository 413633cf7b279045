#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/tools/minima.hpp>

#include "distance.hpp"
#include "helpers.hpp"
#include "likelihood.hpp"
#include "normal.hpp"
#include "oracle.hpp"

using namespace clpm;
using testing::make_state;
using testing::rel_diff;

namespace {

double pair_sq_dist(const ModelState& s, const ChangePointGrid& grid, NodeId i, NodeId j,
                    double t) {
  const auto zi = interpolate(s.trajectories, grid, i, t);
  const auto zj = interpolate(s.trajectories, grid, j, t);
  double acc = 0.0;
  for (std::size_t c = 0; c < zi.size(); ++c) acc += (zi[c] - zj[c]) * (zi[c] - zj[c]);
  return acc;
}

}  // namespace

TEST_CASE("distance rate examples") {
  const ChangePointGrid grid({0.0, 1.0});
  auto same = make_state(Variant::distance, 2, 2, 2, {0.3, 0.1, 0.3, 0.1, 0.3, 0.1, 0.3, 0.1});
  CHECK(distance::rate(same, grid, 0, 1, 0.5) == 1.0);
  auto apart = make_state(Variant::distance, 2, 2, 2, {0, 0, 0, 0, 1, 1, 1, 1}, 2.0);
  CHECK(distance::rate(apart, grid, 0, 1, 0.5) == doctest::Approx(1.0));
  const double r = std::sqrt(std::log(2.0));
  auto half = make_state(Variant::distance, 2, 2, 2, {0, 0, 0, 0, r, 0, r, 0});
  CHECK(distance::rate(half, grid, 0, 1, 0.2) == doctest::Approx(0.5));
  half.variant = Variant::projection;
  CHECK_THROWS_AS(distance::rate(half, grid, 0, 1, 0.2), VariantMismatch);
}

TEST_CASE("segment parameters") {
  const ChangePointGrid grid({0.0, 1.0});
  const auto still = make_state(Variant::distance, 2, 2, 2, {0, 0, 0, 0, 1, 1, 1, 1});
  CHECK(distance::segment_params(still, grid, 0, 1, 0).degenerate);

  // z_i: (0,0) -> (1,0), z_j = (1,0) static.
  const auto meet = make_state(Variant::distance, 2, 2, 2, {0, 0, 1, 0, 1, 0, 1, 0});
  const auto p = distance::segment_params(meet, grid, 0, 1, 0);
  CHECK_FALSE(p.degenerate);
  CHECK(p.mu == doctest::Approx(1.0));
  CHECK(p.sigma == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(p.offset == doctest::Approx(0.0));
  CHECK(p.delta_norm_sq == 1.0);
}

TEST_CASE("completed square reproduces the exponent pointwise") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = oracle::random_instance(Variant::distance, 500 + seed);
    const auto& grid = inst.grid;
    for (std::size_t g = 0; g < grid.num_segments(); ++g) {
      const auto p = distance::segment_params(inst.state, grid, 0, 1, g);
      if (p.degenerate) continue;
      for (double u : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double t = u == 1.0 ? grid[g + 1] : grid[g] + u * grid.length(g);
        const double direct = -pair_sq_dist(inst.state, grid, 0, 1, t);
        const double rebuilt = -p.offset - (u - p.mu) * (u - p.mu) / (2.0 * p.sigma * p.sigma);
        CHECK(std::abs(direct - rebuilt) <= 1e-10 * std::max(1.0, std::abs(direct)));
      }
    }
  }
}

TEST_CASE("offset is the minimum squared distance on the line") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = oracle::random_instance(Variant::distance, 900 + seed);
    const auto& grid = inst.grid;
    const auto& traj = inst.state.trajectories;
    for (std::size_t g = 0; g < grid.num_segments(); ++g) {
      const auto p = distance::segment_params(inst.state, grid, 0, 1, g);
      if (p.degenerate) continue;
      CHECK(p.offset >= 0.0);
      const auto line = [&](double u) {
        double acc = 0.0;
        for (std::size_t c = 0; c < traj.dim(); ++c) {
          const double a = traj.at(0, g)[c] - traj.at(1, g)[c];
          const double b = traj.at(0, g + 1)[c] - traj.at(1, g + 1)[c] - a;
          acc += (a + u * b) * (a + u * b);
        }
        return acc;
      };
      const auto [u_min, q_min] =
          boost::math::tools::brent_find_minima(line, p.mu - 10.0, p.mu + 10.0, 50);
      CHECK(std::abs(q_min - p.offset) <= 1e-9 * std::max(1.0, q_min));
      CHECK(p.offset <= std::min(line(0.0), line(1.0)) + 1e-12);
      (void)u_min;
    }
  }
}

TEST_CASE("distance integral examples") {
  const ChangePointGrid grid({0.0, 3.0});
  const auto still = make_state(Variant::distance, 2, 2, 2, {0, 0, 0, 0, 1, 1, 1, 1}, 0.5);
  CHECK(rel_diff(distance::integral(still, grid, 0, 1), 3.0 * std::exp(0.5 - 2.0)) < 1e-14);

  // exp(-(1-t)^2) on [0,1]: sqrt(pi) (1/2 - Phi(-sqrt 2)) = integral of exp(-t^2) on [0,1].
  const ChangePointGrid unit({0.0, 1.0});
  const auto meet = make_state(Variant::distance, 2, 2, 2, {0, 0, 1, 0, 1, 0, 1, 0});
  const double closed = std::sqrt(std::numbers::pi) * (0.5 - normal::cdf(-std::sqrt(2.0)));
  const double frozen = 0.7468241328124270254;
  CHECK(rel_diff(closed, frozen) < 1e-14);
  CHECK(rel_diff(distance::integral(meet, unit, 0, 1), frozen) < 1e-14);
  CHECK(rel_diff(oracle::integrate([](double t) { return std::exp(-(1 - t) * (1 - t)); }, 0, 1),
                 frozen) < 1e-13);
}

TEST_CASE("distance integral matches quadrature on random instances") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = oracle::random_instance(Variant::distance, 4000 + seed);
    const auto n = inst.state.trajectories.num_nodes();
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        CHECK(rel_diff(distance::integral(inst.state, inst.grid, i, j),
                       oracle::rate_integral(inst.state, inst.grid, i, j)) < 1e-10);
      }
    }
  }
}

TEST_CASE("segment moments match quadrature") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> a{u(rng), u(rng)}, c{u(rng), u(rng)};
    const double beta = u(rng);
    const auto m = distance::segment_moments(a, c, beta);
    const auto rate = [&](double s) {
      const double d0 = (1 - s) * a[0] + s * c[0], d1 = (1 - s) * a[1] + s * c[1];
      return std::exp(beta - d0 * d0 - d1 * d1);
    };
    CHECK(rel_diff(m.m0, oracle::integrate(rate, 0, 1)) < 1e-10);
    CHECK(rel_diff(m.m1, oracle::integrate([&](double s) { return s * rate(s); }, 0, 1)) < 1e-9);
    CHECK(rel_diff(m.m2, oracle::integrate([&](double s) { return s * s * rate(s); }, 0, 1)) < 1e-9);
  }
}

TEST_CASE("degenerate branch is continuous with the closed form") {
  const ChangePointGrid grid({0.0, 2.0});
  const auto with_motion = [](double b_sq) {
    const double step = std::sqrt(b_sq);
    return make_state(Variant::distance, 2, 2, 2, {0.3, -0.2, 0.3 + step, -0.2, 1.1, 0.4, 1.1, 0.4},
                      0.7);
  };
  const auto near = with_motion(1e-7);
  REQUIRE_FALSE(distance::segment_params(near, grid, 0, 1, 0).degenerate);
  CHECK(rel_diff(distance::integral(near, grid, 0, 1), oracle::rate_integral(near, grid, 0, 1)) <
        1e-6);

  const auto above = with_motion(1.0001e-8);
  const auto below = with_motion(0.9999e-8);
  REQUIRE_FALSE(distance::segment_params(above, grid, 0, 1, 0).degenerate);
  REQUIRE(distance::segment_params(below, grid, 0, 1, 0).degenerate);
  CHECK(rel_diff(distance::integral(above, grid, 0, 1), distance::integral(below, grid, 0, 1)) <
        1e-6);
  CHECK(rel_diff(distance::integral(below, grid, 0, 1), oracle::rate_integral(below, grid, 0, 1)) <
        1e-12);
}

TEST_CASE("distance loglik examples") {
  const ChangePointGrid grid({0.0, 1.0});
  const auto state = make_state(Variant::distance, 2, 2, 2, {0, 0, 0, 0, 0, 0, 0, 0});
  CHECK(distance::loglik(state, grid, EventList({}, 1.0, 2)).total() == doctest::Approx(-1.0));
  CHECK(distance::loglik(state, grid, EventList({{0.4, 0, 1}}, 1.0, 2)).total() ==
        doctest::Approx(-1.0));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = oracle::random_instance(Variant::distance, 6000 + seed);
    CHECK(rel_diff(distance::loglik(inst.state, inst.grid, inst.events).total(),
                   oracle::loglik(inst.state, inst.grid, inst.events)) < 1e-8);
  }
}

TEST_CASE("distance loglik is invariant under isometries") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = oracle::random_instance(Variant::distance, 7000 + seed);
    const double base = distance::loglik(inst.state, inst.grid, inst.events).total();
    const double angle = 0.3 + seed;
    const double cs = std::cos(angle), sn = std::sin(angle);
    for (int kind = 0; kind < 3; ++kind) {
      auto moved = inst.state;
      for (std::size_t p = 0; p < moved.trajectories.values().size(); p += 2) {
        double& x = moved.trajectories.values()[p];
        double& y = moved.trajectories.values()[p + 1];
        const double x0 = x, y0 = y;
        if (kind == 0) {
          x = cs * x0 - sn * y0;
          y = sn * x0 + cs * y0;
        } else if (kind == 1) {
          y = -y0;
        } else {
          x = x0 + 5.0;
          y = y0 - 2.5;
        }
      }
      CHECK(rel_diff(distance::loglik(moved, inst.grid, inst.events).total(), base) < 1e-10);
    }
  }
}

TEST_CASE("shifting beta changes the loglik by the predicted amount") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = oracle::random_instance(Variant::distance, 8000 + seed);
    const auto before = distance::loglik(inst.state, inst.grid, inst.events);
    for (double delta : {-1.3, 0.2, 2.0}) {
      auto shifted = inst.state;
      shifted.beta += delta;
      const auto after = distance::loglik(shifted, inst.grid, inst.events);
      const double expected = delta * static_cast<double>(inst.events.size()) -
                              std::expm1(delta) * before.integral_term;
      CHECK(after.total() - before.total() ==
            doctest::Approx(expected).epsilon(1e-10).scale(std::abs(before.total())));
    }
  }
}
