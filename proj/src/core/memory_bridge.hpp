#pragma once

#include <cstdint>
#include <optional>

#include "core/graph.hpp"
#include "core/tensor.hpp"

namespace mmb {

// The learnable key/value memory pair. Source features address the key
// matrix; convex combinations of the value matrix reconstruct or recall
// target features.
struct MemoryPair {
  Tensor key;    // slots x key_dim
  Tensor value;  // slots x value_dim
  double scale;  // softmax sharpness applied to cosine scores

  int slot_count() const { return key.shape[0]; }
  int key_dim() const { return key.shape[1]; }
  int value_dim() const { return value.shape[1]; }

  // Rows drawn from a spherical gaussian and normalized to unit L2 norm, so
  // initial addressing is near-uniform regardless of query direction.
  static MemoryPair init(int slots, int key_dim, int value_dim, double scale,
                         std::uint64_t seed, bool learnable = true);
};

struct BridgeOutput {
  Tensor source_addressing;                 // T x slots, rows sum to 1
  std::optional<Tensor> target_addressing;  // present iff target was given
  Tensor recalled;                          // T x value_dim, source-driven read
  std::optional<Tensor> reconstructed;      // T x value_dim, target-driven read
};

// Addressing distribution for one query (or one row per query):
// softmax(scale * cos(memory_row, query)).
Tensor address(Graph& g, const Tensor& memory, const Tensor& query,
               double scale);

// Convex read of the value memory: addressing . value. Used both for
// recall (source addressing) and reconstruction (target addressing).
Tensor read_value_memory(Graph& g, const Tensor& addressing,
                         const Tensor& value_memory);

// Sum over steps of squared reconstruction error; the trainer divides by T.
Tensor saving_loss(Graph& g, const Tensor& target_features,
                   const Tensor& reconstructed);

// Sum over steps of KL(target addressing || source addressing); the trainer
// divides by T. With detach_target (the default) no gradient reaches the
// producers of the target addressing.
Tensor bridging_loss(Graph& g, const Tensor& target_addressing,
                     const Tensor& source_addressing,
                     bool detach_target = true);

// Full per-sample pass: addresses every temporal step of the source
// features, recalls target-like features, and when target features are
// given also addresses them and reconstructs. Source-only inference passes
// target_features = nullptr.
BridgeOutput bridge_forward(Graph& g, const Tensor& source_features,
                            const Tensor* target_features,
                            const MemoryPair& memory,
                            bool detach_save_addressing = false);

}  // namespace mmb
