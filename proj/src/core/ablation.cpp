#include "core/ablation.hpp"

#include <sstream>

#include "core/errors.hpp"
#include "core/textio.hpp"

namespace mmb {

AblationTable ablate_slots(const RunConfig& base,
                           const std::vector<int>& slot_counts,
                           const std::vector<std::uint64_t>& seeds,
                           const Dataset& train_set, const Dataset& test_set,
                           const EpochCallback& on_epoch) {
  if (slot_counts.empty())
    throw ValidationError("ablate: need at least one slot count");
  if (seeds.empty()) throw ValidationError("ablate: need at least one seed");

  AblationTable table;
  for (int slots : slot_counts) {
    AblationRow row;
    row.slots = slots;
    double acc_sum = 0.0;
    for (std::uint64_t seed : seeds) {
      RunConfig config = base;
      config.model.slots = slots;
      config.seed = seed;
      try {
        TrainResult trained = train_model(config, train_set, test_set, on_epoch);
        EvalDataSource source(test_set);
        AblationCell cell;
        cell.seed = seed;
        cell.report = evaluate(trained.model, source,
                               slots == 0 ? EvalMode::Baseline : EvalMode::Oracle);
        cell.accuracy = slots == 0 ? *cell.report.acc_baseline
                                   : *cell.report.acc_recall;
        acc_sum += cell.accuracy;
        row.cells.push_back(std::move(cell));
      } catch (const Error& e) {
        throw Error(e.kind(), "ablation run (slots=" + std::to_string(slots) +
                                  ", seed=" + std::to_string(seed) +
                                  ") failed: " + e.what());
      }
    }
    row.mean_accuracy = acc_sum / seeds.size();
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string AblationTable::to_text(const std::string& config_echo_json) const {
  std::ostringstream os;
  os << "slot-count ablation (accuracy: recall mode, baseline at 0 slots)\n";
  if (!config_echo_json.empty()) os << "config: " << config_echo_json << "\n";
  for (const AblationRow& row : rows) {
    os << "  slots=" << row.slots
       << "  mean_accuracy=" << fmt_double(row.mean_accuracy) << "  per-seed:";
    for (const AblationCell& cell : row.cells)
      os << " " << cell.seed << ":" << fmt_double(cell.accuracy);
    os << "\n";
  }
  return os.str();
}

std::string AblationTable::to_csv(const std::string& config_echo_json) const {
  std::ostringstream os;
  os << "# mmbridge ablation v1\n";
  if (!config_echo_json.empty()) os << "# config: " << config_echo_json << "\n";
  os << "slots,seed,accuracy,mean_accuracy\n";
  for (const AblationRow& row : rows)
    for (const AblationCell& cell : row.cells)
      os << row.slots << ',' << cell.seed << ',' << fmt_double(cell.accuracy)
         << ',' << fmt_double(row.mean_accuracy) << "\n";
  return os.str();
}

}  // namespace mmb
