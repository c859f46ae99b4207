#pragma once

#include "core/graph.hpp"
#include "core/tensor.hpp"

namespace mmb::ops {

// Every op evaluates forward, and when any input carries gradient state,
// records an exact adjoint on the graph. Rank-1 inputs are treated as a
// single row where a matrix is expected.

Tensor add(Graph& g, const Tensor& a, const Tensor& b);
Tensor scale(Graph& g, const Tensor& x, double c);

// a: m x k (or rank-1 k), b: k x n  ->  m x n (or rank-1 n)
Tensor matmul(Graph& g, const Tensor& a, const Tensor& b);

// x: m x n, bias: n  ->  m x n, bias added to every row
Tensor add_row_bias(Graph& g, const Tensor& x, const Tensor& bias);

Tensor tanh(Graph& g, const Tensor& x);

// a: m x p, b: m x q  ->  m x (p+q)
Tensor concat_cols(Graph& g, const Tensor& a, const Tensor& b);

// x: m x n  ->  n (column means)
Tensor mean_rows(Graph& g, const Tensor& x);

// Cosine similarity of every query row against every key row.
// queries: m x d (or d), keys: n x d  ->  m x n (or n).
// Norms are clamped to norm_epsilon unless eps_guard is off, in which case
// a zero-norm row raises a DomainError.
Tensor cosine_rows(Graph& g, const Tensor& queries, const Tensor& keys,
                   bool eps_guard = true);

// Scalar form of the above for two vectors.
Tensor cosine_similarity(Graph& g, const Tensor& a, const Tensor& b,
                         bool eps_guard = true);

// Row-wise softmax of sharpness * scores, computed with max subtraction.
Tensor scaled_softmax(Graph& g, const Tensor& scores, double sharpness);

// Sum over rows of KL(p_row || q_row), with the 0*log(0/.)=0 convention.
// q is clamped to kl_epsilon inside the log unless clamp_q is off, in which
// case a zero q component raises a DomainError.
Tensor kl_divergence(Graph& g, const Tensor& p, const Tensor& q,
                     bool clamp_q = true);

// logits: k  ->  scalar, log-sum-exp minus the true-class logit.
Tensor cross_entropy(Graph& g, const Tensor& logits, int label);

// Sum of elementwise squared differences -> scalar.
Tensor squared_error_sum(Graph& g, const Tensor& a, const Tensor& b);

// Copy of numel(shape) elements starting at flat offset, reshaped. The
// adjoint routes straight back into the source range.
Tensor slice(Graph& g, const Tensor& x, std::size_t offset,
             std::vector<int> shape);

// Same values, no gradient linkage to the producers.
Tensor detach(const Tensor& x);

inline constexpr double norm_epsilon = 1e-8;
inline constexpr double kl_epsilon = 1e-12;

}  // namespace mmb::ops
