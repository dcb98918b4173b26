#pragma once

#include <cstddef>
#include <string>

#include "blcs/relation_net/training.hpp"

namespace blcs::rn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t parameters_checked = 0;
  std::string worst_parameter;
};

/// |a - n| / max(|a|, |n|), or |a - n| when both magnitudes are below `floor`.
double relative_error(double analytic, double numeric, double floor);

/// Central differences on every parameter against backpropagation.
/// `eps` must lie in (0, 1e-2].
GradCheckResult grad_check(const RnModel& m, const TrainSample& sample, double eps);

}  // namespace blcs::rn
