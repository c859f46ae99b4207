#pragma once

#include <cstdint>

#include "core/graph.hpp"
#include "core/tensor.hpp"

namespace mmb {

// Downstream classification head: per-step fusion of source features with a
// target-like sequence (recalled or actual), temporal mean-pooling, then a
// linear classifier. For the memoryless baseline the fusion input is the
// source features alone.
struct HeadParams {
  Tensor fusion_w;  // fused_in x fusion_dim
  Tensor fusion_b;  // fusion_dim
  Tensor class_w;   // fusion_dim x num_classes
  Tensor class_b;   // num_classes

  int fused_in() const { return fusion_w.shape[0]; }
  int num_classes() const { return class_w.shape[1]; }

  static HeadParams init(int fused_in, int fusion_dim, int num_classes,
                         std::uint64_t seed, bool learnable = true);
};

// Per-step concat then affine map -> T x fusion_dim.
Tensor fuse(Graph& g, const Tensor& source_features, const Tensor& target_like,
            const HeadParams& params);

// Baseline variant without a target-like stream.
Tensor fuse_source_only(Graph& g, const Tensor& source_features,
                        const HeadParams& params);

// Mean-pool over steps, then affine map to logits.
Tensor classify(Graph& g, const Tensor& fused, const HeadParams& params);

// Two-term loss: cross-entropy of the recalled-feature logits plus
// cross-entropy of the oracle (actual target) logits.
Tensor task_loss(Graph& g, const Tensor& logits_recalled,
                 const Tensor& logits_oracle, int label);

// save/T + bridge/T + task; null loss pointers are skipped (memoryless
// baseline trains on the task term alone).
Tensor total_loss(Graph& g, const Tensor* l_save, const Tensor* l_bridge,
                  const Tensor& l_task, int seq_len);

}  // namespace mmb
