#include "core/memory_bridge.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "core/rng.hpp"

namespace mmb {

MemoryPair MemoryPair::init(int slots, int key_dim, int value_dim, double scale,
                            std::uint64_t seed, bool learnable) {
  if (slots < 1) throw ValidationError("memory: slot count must be >= 1");
  if (!(scale > 0.0)) throw ValidationError("memory: scale must be positive");
  MemoryPair m;
  m.scale = scale;
  Rng key_rng(derive_seed(seed, "memory.key"));
  Rng value_rng(derive_seed(seed, "memory.value"));
  m.key = Tensor::zeros({slots, key_dim}, learnable);
  m.value = Tensor::zeros({slots, value_dim}, learnable);
  auto fill_unit_rows = [](Tensor& t, Rng& rng) {
    const int rows = t.shape[0], cols = t.shape[1];
    for (int i = 0; i < rows; ++i) {
      double norm = 0.0;
      for (int j = 0; j < cols; ++j) {
        const double v = rng.gaussian();
        t.at(i, j) = v;
        norm += v * v;
      }
      norm = std::sqrt(norm);
      for (int j = 0; j < cols; ++j) t.at(i, j) /= norm;
    }
  };
  fill_unit_rows(m.key, key_rng);
  fill_unit_rows(m.value, value_rng);
  return m;
}

Tensor address(Graph& g, const Tensor& memory, const Tensor& query,
               double scale) {
  Tensor scores = ops::cosine_rows(g, query, memory);
  return ops::scaled_softmax(g, scores, scale);
}

Tensor read_value_memory(Graph& g, const Tensor& addressing,
                         const Tensor& value_memory) {
  return ops::matmul(g, addressing, value_memory);
}

Tensor saving_loss(Graph& g, const Tensor& target_features,
                   const Tensor& reconstructed) {
  return ops::squared_error_sum(g, target_features, reconstructed);
}

Tensor bridging_loss(Graph& g, const Tensor& target_addressing,
                     const Tensor& source_addressing, bool detach_target) {
  if (target_addressing.rows() != source_addressing.rows())
    throw DimensionError("bridging_loss: step count mismatch");
  Tensor p = detach_target ? ops::detach(target_addressing) : target_addressing;
  return ops::kl_divergence(g, p, source_addressing);
}

BridgeOutput bridge_forward(Graph& g, const Tensor& source_features,
                            const Tensor* target_features,
                            const MemoryPair& memory,
                            bool detach_save_addressing) {
  if (source_features.cols() != memory.key_dim())
    throw DimensionError("bridge_forward: source feature width " +
                         source_features.shape_str() +
                         " does not match key memory");
  if (target_features) {
    if (target_features->rows() != source_features.rows())
      throw ValidationError(
          "bridge_forward: temporal alignment violated, source has " +
          std::to_string(source_features.rows()) + " steps, target has " +
          std::to_string(target_features->rows()));
    if (target_features->cols() != memory.value_dim())
      throw DimensionError("bridge_forward: target feature width " +
                           target_features->shape_str() +
                           " does not match value memory");
  }

  BridgeOutput out;
  out.source_addressing = address(g, memory.key, source_features, memory.scale);
  out.recalled = read_value_memory(g, out.source_addressing, memory.value);
  if (target_features) {
    Tensor a_tgt = address(g, memory.value, *target_features, memory.scale);
    Tensor read_addr = detach_save_addressing ? ops::detach(a_tgt) : a_tgt;
    out.reconstructed = read_value_memory(g, read_addr, memory.value);
    out.target_addressing = std::move(a_tgt);
  }
  return out;
}

}  // namespace mmb
