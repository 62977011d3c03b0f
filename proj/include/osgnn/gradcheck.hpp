#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "osgnn/matrix.hpp"

namespace osgnn {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  index_t worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  bool pass = false;
};

// Central-difference check of analytic gradients.
//
// loss(bool with_grad) must be deterministic: it returns the loss value and,
// when with_grad is true, accumulates analytic gradients into the listed
// ParamTensors (which it must zero first or rely on zeroed buffers).
// Relative error uses max(|analytic|, |numeric|, 1e-6) as denominator.
template <class LossFn>
GradCheckReport finite_diff_check(LossFn&& loss,
                                  const std::vector<std::pair<std::string, ParamTensor*>>& params,
                                  double eps, double tol) {
  GradCheckReport rep;
  for (auto& [name, p] : params) p->zero_grad();
  loss(true);
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto& [name, p] : params) analytic.push_back(p->grad.data);

  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    ParamTensor* p = params[pi].second;
    for (std::size_t i = 0; i < p->value.data.size(); ++i) {
      const double orig = p->value.data[i];
      p->value.data[i] = orig + eps;
      const double lp = loss(false);
      p->value.data[i] = orig - eps;
      const double lm = loss(false);
      p->value.data[i] = orig;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double a = analytic[pi][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      const double rel = std::abs(a - numeric) / denom;
      ++rep.checked;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = params[pi].first;
        rep.worst_index = static_cast<index_t>(i);
        rep.worst_analytic = a;
        rep.worst_numeric = numeric;
      }
    }
  }
  rep.pass = rep.max_rel_err < tol;
  return rep;
}

}  // namespace osgnn
