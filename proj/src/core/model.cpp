#include "core/model.hpp"

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "core/rng.hpp"

namespace mmb {

Model Model::init(const ModelConfig& cfg, int src_dim, int tgt_dim,
                  int num_classes, std::uint64_t seed) {
  cfg.validate();
  if (src_dim < 1 || tgt_dim < 1)
    throw ValidationError("model: raw dims must be >= 1");
  if (num_classes < 2) throw ValidationError("model: need >= 2 classes");

  Model m;
  m.cfg = cfg;
  m.src_dim = src_dim;
  m.tgt_dim = tgt_dim;
  m.num_classes = num_classes;

  m.source_encoder = EncoderParams::init(src_dim, cfg.hidden_dim,
                                         cfg.src_feat_dim,
                                         derive_seed(seed, "source_encoder"));
  if (cfg.slots > 0) {
    m.target_encoder = EncoderParams::init(tgt_dim, cfg.hidden_dim,
                                           cfg.tgt_feat_dim,
                                           derive_seed(seed, "target_encoder"));
    m.memory = MemoryPair::init(cfg.slots, cfg.src_feat_dim, cfg.tgt_feat_dim,
                                cfg.scale, derive_seed(seed, "memory"));
    const int fused_in = cfg.src_feat_dim + cfg.tgt_feat_dim;
    m.head = HeadParams::init(fused_in, cfg.fusion_dim, num_classes,
                              derive_seed(seed, "head"));
    if (!cfg.share_head)
      m.oracle_head = HeadParams::init(fused_in, cfg.fusion_dim, num_classes,
                                       derive_seed(seed, "oracle_head"));
  } else {
    m.head = HeadParams::init(cfg.src_feat_dim, cfg.fusion_dim, num_classes,
                              derive_seed(seed, "head"));
  }
  return m;
}

namespace {

template <class ModelT, class TensorT>
std::vector<std::pair<std::string, TensorT*>> collect_params(ModelT& m) {
  std::vector<std::pair<std::string, TensorT*>> out;
  auto push = [&out](const std::string& name, TensorT& t) {
    out.emplace_back(name, &t);
  };
  if (m.memory) {
    push("memory.key", m.memory->key);
    push("memory.value", m.memory->value);
  }
  push("source_encoder.w_in", m.source_encoder.w_in);
  push("source_encoder.b_in", m.source_encoder.b_in);
  push("source_encoder.w_out", m.source_encoder.w_out);
  push("source_encoder.b_out", m.source_encoder.b_out);
  if (m.target_encoder) {
    push("target_encoder.w_in", m.target_encoder->w_in);
    push("target_encoder.b_in", m.target_encoder->b_in);
    push("target_encoder.w_out", m.target_encoder->w_out);
    push("target_encoder.b_out", m.target_encoder->b_out);
  }
  push("head.fusion_w", m.head.fusion_w);
  push("head.fusion_b", m.head.fusion_b);
  push("head.class_w", m.head.class_w);
  push("head.class_b", m.head.class_b);
  if (m.oracle_head) {
    push("oracle_head.fusion_w", m.oracle_head->fusion_w);
    push("oracle_head.fusion_b", m.oracle_head->fusion_b);
    push("oracle_head.class_w", m.oracle_head->class_w);
    push("oracle_head.class_b", m.oracle_head->class_b);
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> Model::parameters() {
  return collect_params<Model, Tensor>(*this);
}

std::vector<std::pair<std::string, const Tensor*>> Model::parameters() const {
  return collect_params<const Model, const Tensor>(*this);
}

Model Model::frozen_clone() const {
  Model copy = *this;
  for (auto& [name, tensor] : collect_params<Model, Tensor>(copy))
    *tensor = tensor->clone(false);
  return copy;
}

SampleLosses training_losses(Graph& g, const Model& model,
                             const ModalSample& sample) {
  const int steps = sample.source.rows();
  Tensor f_src = encode(g, sample.source, model.source_encoder);

  if (!model.has_memory()) {
    Tensor logits = classify(g, fuse_source_only(g, f_src, model.head), model.head);
    SampleLosses out;
    out.task = ops::cross_entropy(g, logits, sample.label);
    out.total = out.task;
    return out;
  }

  Tensor f_tgt = encode(g, sample.target, *model.target_encoder);
  BridgeOutput bridge = bridge_forward(g, f_src, &f_tgt, *model.memory,
                                       model.cfg.detach_save);

  Tensor save_target = model.cfg.detach_save ? ops::detach(f_tgt) : f_tgt;
  Tensor l_save = saving_loss(g, save_target, *bridge.reconstructed);
  Tensor l_bridge =
      bridging_loss(g, *bridge.target_addressing, bridge.source_addressing,
                    model.cfg.detach_target_addressing);

  Tensor logits_recalled =
      classify(g, fuse(g, f_src, bridge.recalled, model.head), model.head);
  const HeadParams& oracle =
      model.cfg.share_head ? model.head : *model.oracle_head;
  Tensor logits_oracle = classify(g, fuse(g, f_src, f_tgt, oracle), oracle);
  Tensor l_task = task_loss(g, logits_recalled, logits_oracle, sample.label);

  SampleLosses out;
  out.total = total_loss(g, &l_save, &l_bridge, l_task, steps);
  out.task = l_task;
  out.save = l_save;
  out.bridge = l_bridge;
  return out;
}

Tensor recall_mode_logits(Graph& g, const Model& model,
                          const Tensor& raw_source) {
  if (!model.has_memory())
    throw ValidationError("recall mode requires a model with memory slots");
  Tensor f_src = encode(g, raw_source, model.source_encoder);
  BridgeOutput bridge = bridge_forward(g, f_src, nullptr, *model.memory);
  return classify(g, fuse(g, f_src, bridge.recalled, model.head), model.head);
}

Tensor oracle_mode_logits(Graph& g, const Model& model,
                          const Tensor& raw_source, const Tensor& raw_target) {
  if (!model.has_memory())
    throw ValidationError("oracle mode requires a model with memory slots");
  Tensor f_src = encode(g, raw_source, model.source_encoder);
  Tensor f_tgt = encode(g, raw_target, *model.target_encoder);
  const HeadParams& oracle =
      model.cfg.share_head ? model.head : *model.oracle_head;
  return classify(g, fuse(g, f_src, f_tgt, oracle), oracle);
}

Tensor baseline_logits(Graph& g, const Model& model, const Tensor& raw_source) {
  if (model.has_memory())
    throw ValidationError("baseline mode requires a memoryless model");
  Tensor f_src = encode(g, raw_source, model.source_encoder);
  return classify(g, fuse_source_only(g, f_src, model.head), model.head);
}

BridgeTrace trace_bridge(Graph& g, const Model& model, const Tensor& raw_source) {
  if (!model.has_memory())
    throw ValidationError("trace_bridge requires a model with memory slots");
  BridgeTrace trace;
  trace.source_features = encode(g, raw_source, model.source_encoder);
  BridgeOutput bridge =
      bridge_forward(g, trace.source_features, nullptr, *model.memory);
  trace.source_addressing = bridge.source_addressing;
  trace.recalled = bridge.recalled;
  return trace;
}

}  // namespace mmb
