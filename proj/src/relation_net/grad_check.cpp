#include "blcs/relation_net/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "blcs/common/error.hpp"

namespace blcs::rn {

double relative_error(double analytic, double numeric, double floor) {
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return scale < floor ? diff : diff / scale;
}

GradCheckResult grad_check(const RnModel& m, const TrainSample& sample, double eps) {
  if (!(eps > 0.0) || eps > 1e-2) throw InvalidInput("grad_check: eps must lie in (0, 1e-2]");
  const TrainSample one[1] = {sample};
  Gradients analytic = compute_gradients(m, one);
  RnModel probe = m;
  auto params = parameter_blocks(probe);
  auto grads = parameter_blocks(analytic.grad);

  GradCheckResult out;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t e = 0; e < params[k].size; ++e) {
      double& p = params[k].data[e];
      const double saved = p;
      p = saved + eps;
      const double up = sample_loss(probe, sample);
      p = saved - eps;
      const double down = sample_loss(probe, sample);
      p = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double err = relative_error(grads[k].data[e], numeric, eps);
      ++out.parameters_checked;
      if (err > out.max_relative_error || out.worst_parameter.empty()) {
        if (err > out.max_relative_error) out.max_relative_error = err;
        out.worst_parameter = params[k].name + "[" + std::to_string(e) + "]";
      }
    }
  }
  return out;
}

}  // namespace blcs::rn
