#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace mmb {

// Dense row-major tensor of doubles, rank 1 or 2 (scalars are shape {1}).
// Data and gradient buffers are shared: copies taken while recording a
// graph alias the same storage, so adjoint accumulation lands in one place.
// Invariant: requires_grad implies the grad buffer exists and matches data
// in size.
struct Tensor {
  std::vector<int> shape;
  std::shared_ptr<std::vector<double>> data;
  std::shared_ptr<std::vector<double>> grad;
  bool requires_grad = false;

  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor from(std::vector<double> values, std::vector<int> shape,
                     bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);

  std::size_t numel() const;
  int rank() const { return static_cast<int>(shape.size()); }
  // Rank-1 tensors count as a single row.
  int rows() const;
  int cols() const;

  double operator[](std::size_t i) const { return (*data)[i]; }
  double& operator[](std::size_t i) { return (*data)[i]; }
  double at(int r, int c) const;
  double& at(int r, int c);

  // Value of a one-element tensor.
  double value() const;

  // Deep copy with fresh buffers.
  Tensor clone(bool requires_grad) const;

  void zero_grad();
  bool all_finite() const;
  std::string shape_str() const;
};

void check_same_shape(const Tensor& a, const Tensor& b, const char* op);
void check_finite(const Tensor& t, const char* what);

}  // namespace mmb
