#include "core/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace mmb {

namespace {

double eval_at(const ScalarFn& fn, const Tensor& point) {
  Graph g;
  Tensor x = point.clone(false);
  Tensor y = fn(g, x);
  if (y.numel() != 1)
    throw DimensionError("grad_check: function must be scalar-valued");
  return y.value();
}

}  // namespace

GradCheckResult grad_check(const ScalarFn& fn, const Tensor& point,
                           double step) {
  Tensor x = point.clone(true);
  Graph g;
  Tensor y = fn(g, x);
  if (y.numel() != 1)
    throw DimensionError("grad_check: function must be scalar-valued");
  g.backward(y);

  GradCheckResult result;
  const std::size_t n = x.numel();
  for (std::size_t i = 0; i < n; ++i) {
    Tensor hi = point.clone(false);
    Tensor lo = point.clone(false);
    (*hi.data)[i] += step;
    (*lo.data)[i] -= step;
    const double numeric = (eval_at(fn, hi) - eval_at(fn, lo)) / (2.0 * step);
    const double analytic = (*x.grad)[i];
    if (!std::isfinite(analytic) || !std::isfinite(numeric)) {
      result.finite = false;
      result.worst_coord = i;
      result.analytic_at_worst = analytic;
      result.numeric_at_worst = numeric;
      result.max_rel_error = std::numeric_limits<double>::infinity();
      return result;
    }
    const double denom =
        std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
    const double rel = std::fabs(analytic - numeric) / denom;
    if (rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_coord = i;
      result.analytic_at_worst = analytic;
      result.numeric_at_worst = numeric;
    }
  }
  return result;
}

}  // namespace mmb
