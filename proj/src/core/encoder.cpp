#include "core/encoder.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "core/rng.hpp"

namespace mmb {

namespace {

Tensor gaussian_matrix(int rows, int cols, double scale, Rng& rng,
                       bool learnable) {
  Tensor t = Tensor::zeros({rows, cols}, learnable);
  for (double& v : *t.data) v = rng.gaussian() * scale;
  return t;
}

}  // namespace

EncoderParams EncoderParams::init(int in_dim, int hidden, int out_dim,
                                  std::uint64_t seed, bool learnable) {
  if (in_dim < 1 || hidden < 1 || out_dim < 1)
    throw ValidationError("encoder: dimensions must be >= 1");
  EncoderParams p;
  Rng rng(derive_seed(seed, "encoder"));
  p.w_in = gaussian_matrix(in_dim, hidden, 1.0 / std::sqrt(in_dim), rng,
                           learnable);
  p.b_in = Tensor::zeros({hidden}, learnable);
  p.w_out = gaussian_matrix(hidden, out_dim, 1.0 / std::sqrt(hidden), rng,
                            learnable);
  p.b_out = Tensor::zeros({out_dim}, learnable);
  return p;
}

Tensor encode(Graph& g, const Tensor& x, const EncoderParams& params) {
  if (x.cols() != params.in_dim())
    throw DimensionError("encode: input width " + x.shape_str() +
                         " does not match encoder input dim " +
                         std::to_string(params.in_dim()));
  Tensor h = ops::add_row_bias(g, ops::matmul(g, x, params.w_in), params.b_in);
  if (params.activation == Activation::Tanh) h = ops::tanh(g, h);
  return ops::add_row_bias(g, ops::matmul(g, h, params.w_out), params.b_out);
}

}  // namespace mmb
