#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "trajectories.hpp"

namespace testing {

// State with positions given node by node, knot by knot.
inline clpm::ModelState make_state(clpm::Variant variant, std::size_t nodes, std::size_t knots,
                                   std::size_t dim, std::vector<double> values,
                                   double beta = 0.0) {
  return {variant, clpm::TrajectorySet(nodes, knots, dim, std::move(values)), beta};
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace testing
