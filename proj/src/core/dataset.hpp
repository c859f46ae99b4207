#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/tensor.hpp"

namespace mmb {

// One paired example: both raw sequences are rendered from the same latent
// code sequence, so they are synchronized step for step (L == S == T).
struct ModalSample {
  Tensor source;  // T x src_dim
  Tensor target;  // T x tgt_dim
  int label = 0;
};

struct Dataset {
  DataConfig spec;
  std::uint64_t seed = 0;
  std::string role;  // "train" or "test"
  std::vector<ModalSample> samples;
};

struct GeneratedData {
  Dataset train;
  Dataset test;
};

// Fixed per-dataset rendering machinery: a codebook of latent "phoneme"
// vectors, one code sequence per class, and one projection per modality.
struct RenderBasis {
  std::vector<std::vector<double>> codebook;       // P x code_dim
  std::vector<std::vector<int>> class_sequences;   // K x T, distinct rows
  Tensor src_projection;                           // code_dim x src_dim
  Tensor tgt_projection;                           // code_dim x tgt_dim
};

RenderBasis build_render_basis(const DataConfig& spec, std::uint64_t seed);

// Deterministic given (class_id, sample_seed): renders the class code
// sequence through both projections, applies the per-sample speaker affine
// jitter when enabled, and adds i.i.d. gaussian noise at each modality's
// level.
ModalSample render_sample(int class_id, std::uint64_t sample_seed,
                          const DataConfig& spec, const RenderBasis& basis);

// Train/test splits are disjoint by sample seed; identical spec + seed
// reproduce the datasets bit for bit.
GeneratedData generate_dataset(const DataConfig& spec, std::uint64_t seed);

// Nearest-centroid accuracy on one raw modality: class centroids from the
// train split, classification of the test split by closest centroid. This
// is the generation-time oracle showing the target modality carries more
// task information than the source.
double centroid_accuracy(const Dataset& train, const Dataset& test,
                         bool use_target);

// Versioned binary container (see README for the byte layout). The
// config_echo_json travels in the header verbatim.
void save_dataset(const Dataset& dataset, const std::string& path,
                  const std::string& config_echo_json);

struct LoadedDataset {
  Dataset dataset;
  std::string config_echo_json;
};

LoadedDataset load_dataset(const std::string& path);

}  // namespace mmb
