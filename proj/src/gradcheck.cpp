#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace clpm {

double gradient_relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), kGradCheckScaleFloor});
  return std::abs(analytic - numeric) / scale;
}

std::vector<double> finite_difference_gradient(const Objective& objective,
                                               const ModelState& state, double h) {
  auto params = pack_parameters(state);
  std::vector<double> out(params.size());
  ModelState probe = state;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + h;
    unpack_parameters(params, probe);
    const double up = objective.value(probe);
    params[k] = saved - h;
    unpack_parameters(params, probe);
    const double down = objective.value(probe);
    params[k] = saved;
    out[k] = (up - down) / (2.0 * h);
  }
  return out;
}

GradCheckReport check_gradient(const Objective& objective, const ModelState& state, double h) {
  const auto analytic = pack_gradient(state.variant, objective.gradient(state));
  const auto numeric = finite_difference_gradient(objective, state, h);
  GradCheckReport report;
  report.num_parameters = analytic.size();
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double err = gradient_relative_error(analytic[k], numeric[k]);
    if (err > report.max_relative_error || k == 0) {
      report.max_relative_error = err;
      report.worst_index = k;
      report.analytic = analytic[k];
      report.numeric = numeric[k];
    }
  }
  return report;
}

}  // namespace clpm
