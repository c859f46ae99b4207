#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/evaluate.hpp"
#include "core/trainer.hpp"

namespace mmb {

struct AblationCell {
  std::uint64_t seed = 0;
  double accuracy = 0.0;  // recall-mode accuracy, or baseline accuracy at N=0
  EvalReport report;
};

struct AblationRow {
  int slots = 0;
  double mean_accuracy = 0.0;
  std::vector<AblationCell> cells;
};

struct AblationTable {
  std::vector<AblationRow> rows;

  std::string to_text(const std::string& config_echo_json) const;
  std::string to_csv(const std::string& config_echo_json) const;
};

// Trains one model per (slot count, seed) on the given splits and reports
// seed-mean accuracies per slot count. Slot count 0 evaluates the
// memoryless baseline. Failures are annotated with the offending (N, seed).
AblationTable ablate_slots(const RunConfig& base,
                           const std::vector<int>& slot_counts,
                           const std::vector<std::uint64_t>& seeds,
                           const Dataset& train_set, const Dataset& test_set,
                           const EpochCallback& on_epoch = nullptr);

}  // namespace mmb
