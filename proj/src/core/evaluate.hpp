#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/model.hpp"

namespace mmb {

// Read-only view over a dataset that counts target-modality accesses, so
// tests can prove that recall-mode evaluation never touches target data.
class EvalDataSource {
 public:
  explicit EvalDataSource(const Dataset& dataset) : dataset_(&dataset) {}

  std::size_t size() const { return dataset_->samples.size(); }
  int label(std::size_t i) const { return dataset_->samples[i].label; }
  const Tensor& source(std::size_t i) const { return dataset_->samples[i].source; }
  const Tensor& target(std::size_t i) const {
    ++target_reads_;
    return dataset_->samples[i].target;
  }
  const DataConfig& spec() const { return dataset_->spec; }
  std::uint64_t target_reads() const { return target_reads_; }

 private:
  const Dataset* dataset_;
  mutable std::uint64_t target_reads_ = 0;
};

enum class EvalMode { Recall, Oracle, Baseline };

EvalMode eval_mode_from_string(const std::string& name);
std::string to_string(EvalMode mode);

// Fields are present only when the mode legitimately computes them; recall
// mode reports accuracy alone because everything else needs target data.
struct EvalReport {
  std::string mode;
  std::size_t sample_count = 0;
  std::optional<double> acc_recall;
  std::optional<double> acc_oracle;
  std::optional<double> acc_baseline;
  // Mean over test steps of |recalled - actual|^2 / |actual|^2.
  std::optional<double> recall_fidelity;
  // Same metric with uniform (1/N) addressing; the untrained-read yardstick.
  std::optional<double> random_addressing_fidelity;
  // Mean per-step KL between target and source addressing.
  std::optional<double> mean_bridge;

  std::string to_text(const std::string& config_echo_json) const;
  std::string to_csv(const std::string& config_echo_json) const;
  std::string to_json() const;
};

// Deterministic metrics over the full set. Recall mode never reads targets;
// oracle mode additionally reports the recall-side metrics and fidelities;
// baseline mode requires a memoryless model.
EvalReport evaluate(const Model& model, EvalDataSource& data, EvalMode mode);

struct SimilarityPair {
  int class_a = 0;
  int index_a = 0;
  int class_b = 0;
  int index_b = 0;
  double similarity = 0.0;
};

// Aggregated cosine similarity between source addressing sequences at
// aligned timesteps: per-step cosine averaged over steps, then averaged
// over same-class and cross-class probe pairs.
struct SimilarityReport {
  double same_class_mean = 0.0;
  double cross_class_mean = 0.0;
  std::size_t same_class_pairs = 0;
  std::size_t cross_class_pairs = 0;
  std::vector<SimilarityPair> pairs;
  std::vector<std::string> warnings;

  std::string to_text(const std::string& config_echo_json) const;
  std::string pairs_to_csv() const;
};

SimilarityReport addressing_similarity(const Model& model, const Dataset& probe,
                                       int max_per_class = 10);

}  // namespace mmb
