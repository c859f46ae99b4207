#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "core/tensor.hpp"

namespace mmb {

// Reverse-mode tape. Forward ops append their adjoint closures in
// construction order; backward() seeds the root gradient with 1 and replays
// the closures in reverse, exactly once. One graph lives for one training
// step and is dropped afterwards.
class Graph {
 public:
  void record(std::function<void()> adjoint) {
    nodes_.push_back(std::move(adjoint));
  }

  // root must be a one-element tensor with gradient state.
  void backward(Tensor& root);

  std::size_t node_count() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

 private:
  std::vector<std::function<void()>> nodes_;
  bool consumed_ = false;
};

}  // namespace mmb
