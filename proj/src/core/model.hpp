#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/encoder.hpp"
#include "core/head.hpp"
#include "core/memory_bridge.hpp"

namespace mmb {

// The trainable network: modality encoders, the key/value memory pair, and
// the classification head. slots == 0 builds the memoryless baseline, which
// keeps only the source encoder and a source-only head.
struct Model {
  ModelConfig cfg;
  int src_dim = 0;
  int tgt_dim = 0;
  int num_classes = 0;

  std::optional<MemoryPair> memory;
  EncoderParams source_encoder;
  std::optional<EncoderParams> target_encoder;
  HeadParams head;
  std::optional<HeadParams> oracle_head;  // present iff !cfg.share_head

  bool has_memory() const { return memory.has_value(); }

  static Model init(const ModelConfig& cfg, int src_dim, int tgt_dim,
                    int num_classes, std::uint64_t seed);

  // All learnable tensors in a stable order, keyed by stable names. This is
  // the parameter-store surface the optimizer and checkpoints work against.
  std::vector<std::pair<std::string, Tensor*>> parameters();
  std::vector<std::pair<std::string, const Tensor*>> parameters() const;

  // Deep copy without gradient state; safe to share across threads for
  // read-only inference.
  Model frozen_clone() const;
};

struct SampleLosses {
  Tensor total;
  Tensor task;
  std::optional<Tensor> save;
  std::optional<Tensor> bridge;
};

// Full training pass for one sample (both modalities), per the training
// algorithm: embed, address per step, reconstruct + recall, then the
// saving, bridging, and two-term task losses combined as save/T + bridge/T
// + task. The baseline path reduces to a single source-only task term.
SampleLosses training_losses(Graph& g, const Model& model,
                             const ModalSample& sample);

// Inference paths. Recall mode consumes no target-modality data.
Tensor recall_mode_logits(Graph& g, const Model& model, const Tensor& raw_source);
Tensor oracle_mode_logits(Graph& g, const Model& model, const Tensor& raw_source,
                          const Tensor& raw_target);
Tensor baseline_logits(Graph& g, const Model& model, const Tensor& raw_source);

// Encoded features plus bridge readouts for analysis paths.
struct BridgeTrace {
  Tensor source_features;
  Tensor source_addressing;
  Tensor recalled;
};

BridgeTrace trace_bridge(Graph& g, const Model& model, const Tensor& raw_source);

}  // namespace mmb
