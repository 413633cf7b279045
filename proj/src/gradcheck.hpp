#pragma once

#include <cstddef>
#include <vector>

#include "objective.hpp"

namespace clpm {

/// Magnitude below which gradient components are compared absolutely rather
/// than relatively (central differences carry ~1e-9 absolute roundoff).
inline constexpr double kGradCheckScaleFloor = 1e-2;

/// |a - b| / max(|a|, |b|, kGradCheckScaleFloor)
double gradient_relative_error(double analytic, double numeric);

/// Central differences of the objective over the free parameters, in
/// pack_parameters order.
std::vector<double> finite_difference_gradient(const Objective& objective,
                                               const ModelState& state, double h = 1e-5);

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t num_parameters = 0;
};

GradCheckReport check_gradient(const Objective& objective, const ModelState& state,
                               double h = 1e-5);

}  // namespace clpm
