#include "core/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"
#include "core/evaluate.hpp"
#include "core/ops.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

namespace mmb {

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "sgd_momentum") return OptimizerKind::SgdMomentum;
  if (name == "adam") return OptimizerKind::Adam;
  throw ValidationError("unknown optimizer '" + name + "'");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, double momentum)
    : kind_(kind), lr_(learning_rate), momentum_(momentum) {
  if (!(learning_rate >= 0.0))
    throw ValidationError("optimizer: learning rate must be >= 0");
}

void Optimizer::step(std::vector<std::pair<std::string, Tensor*>>& params) {
  ++steps_done_;
  for (auto& [name, tensor] : params) {
    if (!tensor->grad)
      throw ValidationError("optimizer: parameter '" + name +
                            "' has no gradient buffer");
    std::vector<double>& value = *tensor->data;
    std::vector<double>& grad = *tensor->grad;
    const std::size_t n = value.size();
    switch (kind_) {
      case OptimizerKind::Sgd:
        for (std::size_t i = 0; i < n; ++i) value[i] -= lr_ * grad[i];
        break;
      case OptimizerKind::SgdMomentum: {
        auto& velocity = first_moment_[name];
        if (velocity.empty()) velocity.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          velocity[i] = momentum_ * velocity[i] + grad[i];
          value[i] -= lr_ * velocity[i];
        }
        break;
      }
      case OptimizerKind::Adam: {
        auto& m = first_moment_[name];
        auto& v = second_moment_[name];
        if (m.empty()) m.assign(n, 0.0);
        if (v.empty()) v.assign(n, 0.0);
        const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(steps_done_));
        const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(steps_done_));
        for (std::size_t i = 0; i < n; ++i) {
          m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * grad[i];
          v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
          const double m_hat = m[i] / bc1;
          const double v_hat = v[i] / bc2;
          value[i] -= lr_ * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
        }
        break;
      }
    }
    for (double& gi : grad) gi = 0.0;
  }
}

namespace {

void check_loss_finite(double v, const char* term, int epoch, std::size_t iteration) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "training aborted: " << term << " went non-finite at epoch " << epoch
       << ", iteration " << iteration;
    throw NumericError(os.str());
  }
}

}  // namespace

TrainResult train_model(const RunConfig& config, const Dataset& train_set,
                        const Dataset& test_set, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.samples.empty())
    throw ValidationError("train: empty training set");
  if (train_set.spec.src_dim != config.data.src_dim ||
      train_set.spec.tgt_dim != config.data.tgt_dim)
    throw ValidationError("train: dataset dims do not match config");

  TrainResult result;
  result.model = Model::init(config.model, config.data.src_dim,
                             config.data.tgt_dim, config.data.num_classes,
                             derive_seed(config.seed, "model_init"));
  result.log.has_memory = result.model.has_memory();

  Optimizer optimizer(optimizer_kind_from_string(config.train.optimizer),
                      config.train.learning_rate, config.train.momentum);
  auto params = result.model.parameters();

  std::vector<std::size_t> order(train_set.samples.size());
  std::iota(order.begin(), order.end(), 0);
  const int batch_size = config.train.batch_size;
  std::size_t iteration = 0;

  for (int epoch = 0; epoch < config.train.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    Rng shuffle_rng(derive_seed(config.seed, "batch_order", epoch));
    shuffle_rng.shuffle(order);

    double sum_save = 0.0, sum_bridge = 0.0, sum_task = 0.0, sum_total = 0.0;
    const std::size_t sample_count = order.size();

    for (std::size_t start = 0; start < sample_count; start += batch_size) {
      const std::size_t end = std::min(start + batch_size, sample_count);
      const double inv_batch = 1.0 / static_cast<double>(end - start);

      Graph g;
      Tensor batch_total;
      for (std::size_t k = start; k < end; ++k) {
        const ModalSample& sample = train_set.samples[order[k]];
        SampleLosses losses = training_losses(g, result.model, sample);

        check_loss_finite(losses.task.value(), "task loss", epoch, iteration);
        if (losses.save)
          check_loss_finite(losses.save->value(), "saving loss", epoch, iteration);
        if (losses.bridge)
          check_loss_finite(losses.bridge->value(), "bridging loss", epoch,
                            iteration);
        check_loss_finite(losses.total.value(), "total loss", epoch, iteration);

        sum_task += losses.task.value();
        sum_total += losses.total.value();
        if (losses.save) sum_save += losses.save->value();
        if (losses.bridge) sum_bridge += losses.bridge->value();

        batch_total = (k == start) ? losses.total
                                   : ops::add(g, batch_total, losses.total);
      }
      Tensor batch_mean = ops::scale(g, batch_total, inv_batch);
      g.backward(batch_mean);
      optimizer.step(params);
      ++iteration;
    }

    MetricsRow row;
    row.epoch = epoch;
    row.l_task = sum_task / sample_count;
    row.l_total = sum_total / sample_count;
    if (result.model.has_memory()) {
      row.l_save = sum_save / sample_count;
      row.l_bridge = sum_bridge / sample_count;
    }

    const bool eval_now = !test_set.samples.empty() &&
                          ((epoch + 1) % config.train.eval_every == 0 ||
                           epoch + 1 == config.train.epochs);
    if (eval_now) {
      EvalDataSource source(test_set);
      if (result.model.has_memory()) {
        EvalReport report = evaluate(result.model, source, EvalMode::Oracle);
        row.acc_recall = report.acc_recall;
        row.acc_oracle = report.acc_oracle;
        row.recall_fidelity = report.recall_fidelity;
        row.test_bridge = report.mean_bridge;
      } else {
        EvalReport report = evaluate(result.model, source, EvalMode::Baseline);
        row.acc_baseline = report.acc_baseline;
      }
    }

    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      epoch_start)
            .count();
    result.log.rows.push_back(row);
    if (on_epoch) on_epoch(row);
  }
  return result;
}

std::string MetricsLog::to_csv(const std::string& config_echo_json) const {
  std::ostringstream os;
  os << "# mmbridge metrics v1\n";
  if (!config_echo_json.empty()) os << "# config: " << config_echo_json << "\n";
  if (has_memory) {
    os << "epoch,l_save,l_bridge,l_task,l_total,acc_recall,acc_oracle,"
          "recall_fidelity,test_bridge,wall_seconds\n";
    for (const MetricsRow& r : rows)
      os << r.epoch << ',' << fmt_opt(r.l_save) << ',' << fmt_opt(r.l_bridge)
         << ',' << fmt_double(r.l_task) << ',' << fmt_double(r.l_total) << ','
         << fmt_opt(r.acc_recall) << ',' << fmt_opt(r.acc_oracle) << ','
         << fmt_opt(r.recall_fidelity) << ',' << fmt_opt(r.test_bridge) << ','
         << fmt_double(r.wall_seconds) << "\n";
  } else {
    os << "epoch,l_task,l_total,acc_baseline,wall_seconds\n";
    for (const MetricsRow& r : rows)
      os << r.epoch << ',' << fmt_double(r.l_task) << ','
         << fmt_double(r.l_total) << ',' << fmt_opt(r.acc_baseline) << ','
         << fmt_double(r.wall_seconds) << "\n";
  }
  return os.str();
}

bool MetricsLog::same_values(const MetricsLog& other) const {
  if (has_memory != other.has_memory || rows.size() != other.rows.size())
    return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const MetricsRow& a = rows[i];
    const MetricsRow& b = other.rows[i];
    if (a.epoch != b.epoch || a.l_save != b.l_save ||
        a.l_bridge != b.l_bridge || a.l_task != b.l_task ||
        a.l_total != b.l_total || a.acc_recall != b.acc_recall ||
        a.acc_oracle != b.acc_oracle || a.acc_baseline != b.acc_baseline ||
        a.recall_fidelity != b.recall_fidelity ||
        a.test_bridge != b.test_bridge)
      return false;
  }
  return true;
}

}  // namespace mmb
