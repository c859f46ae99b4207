#include "core/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "core/textio.hpp"

namespace mmb {

namespace {

int argmax(const Tensor& logits) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(logits.numel()); ++j)
    if ((*logits.data)[j] > (*logits.data)[best]) best = j;
  return best;
}

}  // namespace

EvalMode eval_mode_from_string(const std::string& name) {
  if (name == "recall") return EvalMode::Recall;
  if (name == "oracle") return EvalMode::Oracle;
  if (name == "baseline") return EvalMode::Baseline;
  throw ValidationError("unknown eval mode '" + name +
                        "' (expected recall, oracle, or baseline)");
}

std::string to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::Recall: return "recall";
    case EvalMode::Oracle: return "oracle";
    case EvalMode::Baseline: return "baseline";
  }
  return "?";
}

EvalReport evaluate(const Model& model, EvalDataSource& data, EvalMode mode) {
  if (data.size() == 0) throw ValidationError("evaluate: empty dataset");
  if (mode == EvalMode::Baseline && model.has_memory())
    throw ValidationError(
        "evaluate: baseline mode needs a memoryless model (slots = 0)");
  if (mode != EvalMode::Baseline && !model.has_memory())
    throw ValidationError("evaluate: mode '" + to_string(mode) +
                          "' needs a model with memory slots");
  if (data.spec().src_dim != model.src_dim)
    throw ValidationError("evaluate: dataset source width " +
                          std::to_string(data.spec().src_dim) +
                          " does not match model input " +
                          std::to_string(model.src_dim));

  const Model frozen = model.frozen_clone();
  const std::size_t n = data.size();

  EvalReport report;
  report.mode = to_string(mode);
  report.sample_count = n;

  if (mode == EvalMode::Baseline) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Graph g;
      if (argmax(baseline_logits(g, frozen, data.source(i))) == data.label(i))
        ++correct;
    }
    report.acc_baseline = static_cast<double>(correct) / n;
    return report;
  }

  if (mode == EvalMode::Recall) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Graph g;
      if (argmax(recall_mode_logits(g, frozen, data.source(i))) == data.label(i))
        ++correct;
    }
    report.acc_recall = static_cast<double>(correct) / n;
    return report;
  }

  // Oracle mode: full report. Uniform-addressing recall is the independent
  // yardstick for fidelity (every step reads the plain column mean of the
  // value memory).
  const MemoryPair& memory = *frozen.memory;
  const int value_dim = memory.value_dim();
  Tensor uniform_read = Tensor::zeros({value_dim});
  for (int j = 0; j < value_dim; ++j) {
    double s = 0.0;
    for (int i = 0; i < memory.slot_count(); ++i) s += memory.value.at(i, j);
    (*uniform_read.data)[j] = s / memory.slot_count();
  }

  std::size_t correct_oracle = 0, correct_recall = 0;
  double fidelity_sum = 0.0, uniform_fidelity_sum = 0.0, bridge_sum = 0.0;
  std::size_t step_count = 0;

  for (std::size_t i = 0; i < n; ++i) {
    Graph g;
    const Tensor& raw_src = data.source(i);
    const Tensor& raw_tgt = data.target(i);

    Tensor f_src = encode(g, raw_src, frozen.source_encoder);
    Tensor f_tgt = encode(g, raw_tgt, *frozen.target_encoder);
    BridgeOutput bridge = bridge_forward(g, f_src, &f_tgt, memory);

    const HeadParams& oracle_head =
        frozen.cfg.share_head ? frozen.head : *frozen.oracle_head;
    if (argmax(classify(g, fuse(g, f_src, f_tgt, oracle_head), oracle_head)) ==
        data.label(i))
      ++correct_oracle;
    if (argmax(classify(g, fuse(g, f_src, bridge.recalled, frozen.head),
                        frozen.head)) == data.label(i))
      ++correct_recall;

    const int steps = f_tgt.rows();
    for (int j = 0; j < steps; ++j) {
      double err = 0.0, uerr = 0.0, ref = 0.0;
      for (int c = 0; c < value_dim; ++c) {
        const double actual = f_tgt.at(j, c);
        const double d = bridge.recalled.at(j, c) - actual;
        const double du = (*uniform_read.data)[c] - actual;
        err += d * d;
        uerr += du * du;
        ref += actual * actual;
      }
      fidelity_sum += err / std::max(ref, 1e-12);
      uniform_fidelity_sum += uerr / std::max(ref, 1e-12);
    }
    step_count += steps;

    Tensor kl = ops::kl_divergence(g, *bridge.target_addressing,
                                   bridge.source_addressing);
    bridge_sum += kl.value() / steps;
  }

  report.acc_oracle = static_cast<double>(correct_oracle) / n;
  report.acc_recall = static_cast<double>(correct_recall) / n;
  report.recall_fidelity = fidelity_sum / step_count;
  report.random_addressing_fidelity = uniform_fidelity_sum / step_count;
  report.mean_bridge = bridge_sum / n;
  return report;
}

std::string EvalReport::to_text(const std::string& config_echo_json) const {
  std::ostringstream os;
  os << "evaluation report (mode: " << mode << ", samples: " << sample_count
     << ")\n";
  if (!config_echo_json.empty()) os << "config: " << config_echo_json << "\n";
  auto line = [&os](const char* name, const std::optional<double>& v) {
    if (v) os << "  " << name << ": " << fmt_double(*v) << "\n";
  };
  line("accuracy_recall_mode", acc_recall);
  line("accuracy_oracle_mode", acc_oracle);
  line("accuracy_baseline", acc_baseline);
  line("recall_fidelity", recall_fidelity);
  line("random_addressing_fidelity", random_addressing_fidelity);
  line("mean_bridge", mean_bridge);
  return os.str();
}

std::string EvalReport::to_csv(const std::string& config_echo_json) const {
  std::ostringstream os;
  os << "# mmbridge eval report v1\n";
  if (!config_echo_json.empty()) os << "# config: " << config_echo_json << "\n";
  os << "mode,samples,acc_recall,acc_oracle,acc_baseline,recall_fidelity,"
        "random_addressing_fidelity,mean_bridge\n";
  os << mode << ',' << sample_count << ',' << fmt_opt(acc_recall) << ','
     << fmt_opt(acc_oracle) << ',' << fmt_opt(acc_baseline) << ','
     << fmt_opt(recall_fidelity) << ',' << fmt_opt(random_addressing_fidelity)
     << ',' << fmt_opt(mean_bridge) << "\n";
  return os.str();
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["mode"] = mode;
  doc["samples"] = sample_count;
  auto put = [&doc](const char* key, const std::optional<double>& v) {
    if (v) doc[key] = *v;
  };
  put("acc_recall", acc_recall);
  put("acc_oracle", acc_oracle);
  put("acc_baseline", acc_baseline);
  put("recall_fidelity", recall_fidelity);
  put("random_addressing_fidelity", random_addressing_fidelity);
  put("mean_bridge", mean_bridge);
  return doc.dump();
}

SimilarityReport addressing_similarity(const Model& model, const Dataset& probe,
                                       int max_per_class) {
  if (!model.has_memory())
    throw ValidationError("addressing_similarity: model has no memory");
  if (max_per_class < 1)
    throw ValidationError("addressing_similarity: max_per_class must be >= 1");

  const Model frozen = model.frozen_clone();

  // First max_per_class probes per class, in dataset order.
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < probe.samples.size(); ++i) {
    auto& bucket = by_class[probe.samples[i].label];
    if (static_cast<int>(bucket.size()) < max_per_class) bucket.push_back(i);
  }

  SimilarityReport report;
  struct Probe {
    int label;
    int index;
    Tensor addressing;  // T x slots
  };
  std::vector<Probe> probes;
  for (const auto& [label, indices] : by_class) {
    if (indices.size() < 2)
      report.warnings.push_back("class " + std::to_string(label) +
                                " has fewer than 2 probe samples; skipped "
                                "from same-class statistics");
    for (std::size_t idx : indices) {
      Graph g;
      BridgeTrace trace =
          trace_bridge(g, frozen, probe.samples[idx].source);
      probes.push_back(
          {label, static_cast<int>(idx), trace.source_addressing});
    }
  }
  if (probes.size() < 2)
    throw ValidationError("addressing_similarity: need at least 2 probes");

  // Per-step cosine averaged over aligned steps.
  auto pair_similarity = [](const Tensor& a, const Tensor& b) {
    const int steps = std::min(a.rows(), b.rows());
    const int slots = a.cols();
    double total = 0.0;
    for (int j = 0; j < steps; ++j) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (int s = 0; s < slots; ++s) {
        dot += a.at(j, s) * b.at(j, s);
        na += a.at(j, s) * a.at(j, s);
        nb += b.at(j, s) * b.at(j, s);
      }
      total += dot / std::max(std::sqrt(na) * std::sqrt(nb), 1e-12);
    }
    return total / steps;
  };

  double same_sum = 0.0, cross_sum = 0.0;
  for (std::size_t a = 0; a < probes.size(); ++a)
    for (std::size_t b = a + 1; b < probes.size(); ++b) {
      const double sim =
          pair_similarity(probes[a].addressing, probes[b].addressing);
      report.pairs.push_back({probes[a].label, probes[a].index,
                              probes[b].label, probes[b].index, sim});
      if (probes[a].label == probes[b].label) {
        same_sum += sim;
        ++report.same_class_pairs;
      } else {
        cross_sum += sim;
        ++report.cross_class_pairs;
      }
    }
  if (report.same_class_pairs)
    report.same_class_mean = same_sum / report.same_class_pairs;
  if (report.cross_class_pairs)
    report.cross_class_mean = cross_sum / report.cross_class_pairs;
  return report;
}

std::string SimilarityReport::to_text(const std::string& config_echo_json) const {
  std::ostringstream os;
  os << "addressing similarity report\n";
  os << "aggregation: per-step cosine of source addressing vectors at "
        "aligned timesteps, averaged over steps\n";
  if (!config_echo_json.empty()) os << "config: " << config_echo_json << "\n";
  for (const std::string& w : warnings) os << "warning: " << w << "\n";
  os << "  same_class_pairs: " << same_class_pairs << "\n";
  os << "  cross_class_pairs: " << cross_class_pairs << "\n";
  os << "  same_class_mean_similarity: " << fmt_double(same_class_mean) << "\n";
  os << "  cross_class_mean_similarity: " << fmt_double(cross_class_mean)
     << "\n";
  os << "  separation: " << fmt_double(same_class_mean - cross_class_mean)
     << "\n";
  return os.str();
}

std::string SimilarityReport::pairs_to_csv() const {
  std::ostringstream os;
  os << "class_a,index_a,class_b,index_b,similarity\n";
  for (const SimilarityPair& p : pairs)
    os << p.class_a << ',' << p.index_a << ',' << p.class_b << ',' << p.index_b
       << ',' << fmt_double(p.similarity) << "\n";
  return os.str();
}

}  // namespace mmb
