#include "core/graph.hpp"

#include "core/errors.hpp"

namespace mmb {

void Graph::backward(Tensor& root) {
  if (consumed_) throw ValidationError("graph: backward already run");
  if (root.numel() != 1)
    throw DimensionError("graph: backward root must be a scalar");
  if (!root.requires_grad || !root.grad)
    throw ValidationError("graph: backward root carries no gradient state");
  consumed_ = true;
  (*root.grad)[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
}

}  // namespace mmb
