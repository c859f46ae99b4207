#pragma once

#include <cstdint>

#include "core/graph.hpp"
#include "core/tensor.hpp"

namespace mmb {

enum class Activation { Tanh, Identity };

// Two-layer per-step MLP mapping raw observations (T x in_dim) to features
// (T x out_dim). Applied independently per temporal step, so the output
// sequence length always equals the input length. Identity activation
// exists for tests that need a linear pass-through.
struct EncoderParams {
  Tensor w_in;   // in_dim x hidden
  Tensor b_in;   // hidden
  Tensor w_out;  // hidden x out_dim
  Tensor b_out;  // out_dim
  Activation activation = Activation::Tanh;

  int in_dim() const { return w_in.shape[0]; }
  int out_dim() const { return w_out.shape[1]; }

  // Gaussian weights scaled by 1/sqrt(fan_in), zero biases.
  static EncoderParams init(int in_dim, int hidden, int out_dim,
                            std::uint64_t seed, bool learnable = true);
};

Tensor encode(Graph& g, const Tensor& x, const EncoderParams& params);

}  // namespace mmb
