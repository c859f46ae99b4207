#include "core/head.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "core/rng.hpp"

namespace mmb {

HeadParams HeadParams::init(int fused_in, int fusion_dim, int num_classes,
                            std::uint64_t seed, bool learnable) {
  if (fused_in < 1 || fusion_dim < 1 || num_classes < 2)
    throw ValidationError("head: need fused_in, fusion_dim >= 1 and >= 2 classes");
  HeadParams p;
  Rng rng(derive_seed(seed, "head"));
  p.fusion_w = Tensor::zeros({fused_in, fusion_dim}, learnable);
  for (double& v : *p.fusion_w.data)
    v = rng.gaussian() / std::sqrt(static_cast<double>(fused_in));
  p.fusion_b = Tensor::zeros({fusion_dim}, learnable);
  p.class_w = Tensor::zeros({fusion_dim, num_classes}, learnable);
  for (double& v : *p.class_w.data)
    v = rng.gaussian() / std::sqrt(static_cast<double>(fusion_dim));
  p.class_b = Tensor::zeros({num_classes}, learnable);
  return p;
}

Tensor fuse(Graph& g, const Tensor& source_features, const Tensor& target_like,
            const HeadParams& params) {
  if (source_features.rows() != target_like.rows())
    throw ValidationError("fuse: temporal alignment violated, " +
                          std::to_string(source_features.rows()) + " vs " +
                          std::to_string(target_like.rows()) + " steps");
  Tensor joined = ops::concat_cols(g, source_features, target_like);
  return fuse_source_only(g, joined, params);
}

Tensor fuse_source_only(Graph& g, const Tensor& source_features,
                        const HeadParams& params) {
  if (source_features.cols() != params.fused_in())
    throw DimensionError("fuse: width " + source_features.shape_str() +
                         " does not match fusion input " +
                         std::to_string(params.fused_in()));
  return ops::add_row_bias(g, ops::matmul(g, source_features, params.fusion_w),
                           params.fusion_b);
}

Tensor classify(Graph& g, const Tensor& fused, const HeadParams& params) {
  Tensor pooled = ops::mean_rows(g, fused);
  return ops::add_row_bias(g, ops::matmul(g, pooled, params.class_w),
                           params.class_b);
}

Tensor task_loss(Graph& g, const Tensor& logits_recalled,
                 const Tensor& logits_oracle, int label) {
  Tensor a = ops::cross_entropy(g, logits_recalled, label);
  Tensor b = ops::cross_entropy(g, logits_oracle, label);
  return ops::add(g, a, b);
}

Tensor total_loss(Graph& g, const Tensor* l_save, const Tensor* l_bridge,
                  const Tensor& l_task, int seq_len) {
  if (seq_len < 1) throw ValidationError("total_loss: seq_len must be >= 1");
  Tensor total = l_task;
  const double inv_t = 1.0 / seq_len;
  if (l_save) total = ops::add(g, total, ops::scale(g, *l_save, inv_t));
  if (l_bridge) total = ops::add(g, total, ops::scale(g, *l_bridge, inv_t));
  return total;
}

}  // namespace mmb
