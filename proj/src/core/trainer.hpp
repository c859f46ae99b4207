#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/model.hpp"

namespace mmb {

enum class OptimizerKind { Sgd, SgdMomentum, Adam };

OptimizerKind optimizer_kind_from_string(const std::string& name);

// First-order updates over the model's parameter store. State (momentum /
// moment estimates) is keyed by parameter name. Gradients are zeroed after
// every step.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double momentum = 0.9);

  void step(std::vector<std::pair<std::string, Tensor*>>& params);

  static constexpr double kAdamBeta1 = 0.9;
  static constexpr double kAdamBeta2 = 0.999;
  static constexpr double kAdamEpsilon = 1e-8;

 private:
  OptimizerKind kind_;
  double lr_;
  double momentum_;
  std::uint64_t steps_done_ = 0;
  std::map<std::string, std::vector<double>> first_moment_;
  std::map<std::string, std::vector<double>> second_moment_;
};

struct MetricsRow {
  int epoch = 0;
  std::optional<double> l_save;
  std::optional<double> l_bridge;
  double l_task = 0.0;
  double l_total = 0.0;
  std::optional<double> acc_recall;
  std::optional<double> acc_oracle;
  std::optional<double> acc_baseline;
  std::optional<double> recall_fidelity;
  std::optional<double> test_bridge;
  double wall_seconds = 0.0;
};

// Per-epoch training record. The CSV carries the effective config in
// '#'-prefixed header lines; the wall-time column is informational and is
// excluded from determinism comparisons.
struct MetricsLog {
  bool has_memory = true;
  std::vector<MetricsRow> rows;

  std::string to_csv(const std::string& config_echo_json) const;
  // Every numeric field except wall time, bit for bit.
  bool same_values(const MetricsLog& other) const;
};

struct TrainResult {
  Model model;
  MetricsLog log;
};

using EpochCallback = std::function<void(const MetricsRow&)>;

// End-to-end optimization: per batch, embed both modalities, address and
// recall per step, form save/T + bridge/T + task (batch-averaged), then
// update all parameters. Deterministic given config; aborts with a
// diagnostic naming the offending loss term if anything goes non-finite.
TrainResult train_model(const RunConfig& config, const Dataset& train_set,
                        const Dataset& test_set,
                        const EpochCallback& on_epoch = nullptr);

}  // namespace mmb
