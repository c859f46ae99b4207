#pragma once

#include <cstddef>
#include <functional>

#include "core/graph.hpp"
#include "core/tensor.hpp"

namespace mmb {

// Scalar-valued function of one tensor, building its forward pass on the
// given graph.
using ScalarFn = std::function<Tensor(Graph&, const Tensor&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_coord = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  bool finite = true;  // false if any derivative came out non-finite

  bool passes(double tol) const { return finite && max_rel_error <= tol; }
};

// Compares the reverse-mode gradient of fn at point against central finite
// differences, coordinate by coordinate. Relative error per coordinate is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
GradCheckResult grad_check(const ScalarFn& fn, const Tensor& point,
                           double step = 1e-5);

}  // namespace mmb
