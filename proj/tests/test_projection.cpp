#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "likelihood.hpp"
#include "oracle.hpp"
#include "projection.hpp"

using namespace clpm;
using testing::make_state;
using testing::rel_diff;

TEST_CASE("projection rate examples") {
  const ChangePointGrid grid({0.0, 1.0});
  const auto perp = make_state(Variant::projection, 2, 2, 2, {1, 1e-9, 1, 1e-9, 1e-9, 1, 1e-9, 1});
  CHECK(projection::rate(perp, grid, 0, 1, 0.3) == doctest::Approx(0.0).epsilon(1e-8));
  const auto same = make_state(Variant::projection, 2, 2, 2, {1, 1, 1, 1, 1, 1, 1, 1});
  CHECK(projection::rate(same, grid, 0, 1, 0.7) == 2.0);
  const auto line = make_state(Variant::projection, 2, 2, 2, {2, 1e-12, 2, 1e-12, 3, 1e-12, 3, 1e-12});
  for (double t : {0.0, 0.4, 1.0}) CHECK(projection::rate(line, grid, 0, 1, t) == doctest::Approx(6.0));
  auto dist = same;
  dist.variant = Variant::distance;
  CHECK_THROWS_AS(projection::rate(dist, grid, 0, 1, 0.5), VariantMismatch);
  CHECK_THROWS_AS(projection::integral(dist, grid, 0, 1), VariantMismatch);
}

TEST_CASE("projection integral examples") {
  const ChangePointGrid grid({0.0, 2.5});
  const auto fixed = make_state(Variant::projection, 2, 2, 2, {1, 2, 1, 2, 3, 0.5, 3, 0.5});
  CHECK(projection::integral(fixed, grid, 0, 1) == doctest::Approx(2.5 * 4.0));

  // z_i: (1,0) -> (0,1), z_j = (1,0) static on [0,1]: integral of (1 - t).
  const ChangePointGrid unit({0.0, 1.0});
  const auto turning = make_state(Variant::projection, 2, 2, 2, {1, 0, 0, 1, 1, 0, 1, 0});
  const auto s = projection::dot_products(turning.trajectories, 0, 1, 0);
  CHECK(s.gg == 1.0);
  CHECK(s.gh == 1.0);
  CHECK(s.hg == 0.0);
  CHECK(s.hh == 0.0);
  CHECK(projection::integral(turning, unit, 0, 1) == 0.5);
  CHECK(rel_diff(oracle::integrate([](double t) { return 1.0 - t; }, 0.0, 1.0), 0.5) < 1e-14);
}

TEST_CASE("projection integral matches quadrature on random instances") {
  oracle::RandomInstanceOptions opts;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = oracle::random_instance(Variant::projection, 1000 + seed, opts);
    const auto n = inst.state.trajectories.num_nodes();
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        CHECK(rel_diff(projection::integral(inst.state, inst.grid, i, j),
                       oracle::rate_integral(inst.state, inst.grid, i, j)) < 1e-10);
      }
    }
  }
}

TEST_CASE("projection loglik examples") {
  const ChangePointGrid grid({0.0, 1.0});
  const auto state = make_state(Variant::projection, 2, 2, 2, {1, 1, 1, 1, 1, 1, 1, 1});
  CHECK(projection::loglik(state, grid, EventList({}, 1.0, 2)).total() == doctest::Approx(-2.0));
  CHECK(projection::loglik(state, grid, EventList({{0.5, 0, 1}}, 1.0, 2)).total() ==
        doctest::Approx(std::log(2.0) - 2.0));
}

TEST_CASE("projection loglik matches direct evaluation") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = oracle::random_instance(Variant::projection, 2000 + seed);
    CHECK(rel_diff(projection::loglik(inst.state, inst.grid, inst.events).total(),
                   oracle::loglik(inst.state, inst.grid, inst.events)) < 1e-8);
  }
}

TEST_CASE("floored events are reported") {
  const ChangePointGrid grid({0.0, 1.0});
  // Orthogonal directions: the rate is exactly zero at every time.
  const auto state = make_state(Variant::projection, 2, 2, 2, {1, 0, 1, 0, 0, 1, 0, 1});
  const auto parts = projection::loglik(state, grid, EventList({{0.25, 0, 1}}, 1.0, 2));
  REQUIRE(parts.floor_hits.size() == 1);
  CHECK(parts.floor_hits[0].time == 0.25);
  CHECK(parts.floor_hits[0].a == 0);
  CHECK(parts.floor_hits[0].b == 1);
  CHECK(parts.event_term == doctest::Approx(std::log(projection::kRateFloor)));
}

TEST_CASE("projection loglik is invariant under coordinate permutations") {
  oracle::RandomInstanceOptions opts;
  opts.dim = 3;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = oracle::random_instance(Variant::projection, 3000 + seed, opts);
    const double base = projection::loglik(inst.state, inst.grid, inst.events).total();
    std::vector<std::size_t> perm{0, 1, 2};
    while (std::next_permutation(perm.begin(), perm.end())) {
      auto moved = inst.state;
      const auto& src = inst.state.trajectories;
      for (std::size_t i = 0; i < src.num_nodes(); ++i) {
        for (std::size_t k = 0; k < src.num_knots(); ++k) {
          for (std::size_t c = 0; c < 3; ++c) moved.trajectories.at(i, k)[c] = src.at(i, k)[perm[c]];
        }
      }
      CHECK(rel_diff(projection::loglik(moved, inst.grid, inst.events).total(), base) < 1e-12);
    }
  }
}

TEST_CASE("projection loglik is a sum of independent dyad terms") {
  const auto inst = oracle::random_instance(Variant::projection, 77);
  const DyadTable dyads(inst.events);
  const auto n = inst.state.trajectories.num_nodes();
  std::vector<std::pair<NodeId, NodeId>> order;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) order.emplace_back(i, j);
  }
  const double base = projection::loglik(inst.state, inst.grid, dyads).total();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    LoglikParts parts;
    for (auto [i, j] : order) {
      projection::dyad_loglik(inst.state, inst.grid, i, j, dyads.times(i, j), parts);
    }
    CHECK(rel_diff(parts.total(), base) < 1e-10);
  }
}
