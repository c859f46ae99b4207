#pragma once

#include <cstdint>
#include <string>

namespace mmb {

// Synthetic paired-modality benchmark parameters. The source stream is
// strictly noisier than the target stream, encoding the premise that the
// target modality carries superior task information.
struct DataConfig {
  int num_classes = 20;
  int codebook_size = 8;
  int seq_len = 10;
  int code_dim = 8;
  int src_dim = 24;
  int tgt_dim = 16;
  double noise_src = 0.8;
  double noise_tgt = 0.2;
  int train_per_class = 200;
  int test_per_class = 50;
  bool speaker_jitter = true;

  // strict_noise enforces noise_src > noise_tgt; generation-side helpers
  // accept the degenerate equal-noise case used by tests.
  void validate(bool strict_noise = true) const;
};

struct ModelConfig {
  int slots = 32;  // 0 disables the memory entirely (baseline)
  double scale = 16.0;
  int src_feat_dim = 16;
  int tgt_feat_dim = 16;
  int hidden_dim = 32;
  int fusion_dim = 32;
  bool detach_target_addressing = true;  // bridging loss treats the target
                                         // addressing as a constant
  bool detach_save = false;  // saving loss updates only the value memory
  bool share_head = true;    // one head for both task-loss terms

  void validate() const;
};

struct TrainControl {
  std::string optimizer = "adam";  // adam | sgd | sgd_momentum
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int batch_size = 16;
  int epochs = 30;
  int eval_every = 1;

  void validate() const;
};

struct RunConfig {
  std::uint64_t seed = 1;
  DataConfig data;
  ModelConfig model;
  TrainControl train;

  void validate() const;
};

// Parses a JSON config document against the documented schema: unknown keys
// are rejected, missing keys take the defaults above.
RunConfig parse_config(const std::string& json_text);

// Same, then applies a second JSON document of overrides on top (flag
// values beat file values beat defaults).
RunConfig parse_config(const std::string& json_text,
                       const std::string& overrides_json);

// Stable, fully-populated echo of the effective config; embedded verbatim
// in every artifact the tools write.
std::string config_to_json(const RunConfig& config);

}  // namespace mmb
