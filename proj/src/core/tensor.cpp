#include "core/tensor.hpp"

#include <cmath>
#include <sstream>

#include "core/errors.hpp"

namespace mmb {

namespace {

std::size_t product(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw DimensionError("tensor: non-positive dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

}  // namespace

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  if (shape.empty() || shape.size() > 2)
    throw DimensionError("tensor: rank must be 1 or 2");
  Tensor t;
  const std::size_t n = product(shape);
  t.shape = std::move(shape);
  t.data = std::make_shared<std::vector<double>>(n, 0.0);
  t.requires_grad = requires_grad;
  if (requires_grad) t.grad = std::make_shared<std::vector<double>>(n, 0.0);
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  Tensor t = zeros({1}, requires_grad);
  (*t.data)[0] = value;
  return t;
}

Tensor Tensor::from(std::vector<double> values, std::vector<int> shape,
                    bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  if (values.size() != t.numel())
    throw DimensionError("tensor: value count does not match shape");
  *t.data = std::move(values);
  return t;
}

Tensor Tensor::vector(std::vector<double> values, bool requires_grad) {
  const int n = static_cast<int>(values.size());
  return from(std::move(values), {n}, requires_grad);
}

std::size_t Tensor::numel() const { return data ? data->size() : 0; }

int Tensor::rows() const { return rank() == 2 ? shape[0] : 1; }

int Tensor::cols() const { return rank() == 2 ? shape[1] : shape[0]; }

double Tensor::at(int r, int c) const {
  return (*data)[static_cast<std::size_t>(r) * cols() + c];
}

double& Tensor::at(int r, int c) {
  return (*data)[static_cast<std::size_t>(r) * cols() + c];
}

double Tensor::value() const {
  if (numel() != 1) throw DimensionError("tensor: value() requires one element");
  return (*data)[0];
}

Tensor Tensor::clone(bool rg) const {
  Tensor t = zeros(shape, rg);
  *t.data = *data;
  return t;
}

void Tensor::zero_grad() {
  if (grad)
    for (double& g : *grad) g = 0.0;
}

bool Tensor::all_finite() const {
  for (double v : *data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape != b.shape)
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() +
                         " vs " + b.shape_str());
}

void check_finite(const Tensor& t, const char* what) {
  if (!t.all_finite())
    throw DomainError(std::string(what) + ": non-finite value");
}

}  // namespace mmb
