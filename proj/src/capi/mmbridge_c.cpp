#include "mmbridge.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/ablation.hpp"
#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/evaluate.hpp"
#include "core/gradcheck_suite.hpp"
#include "core/trainer.hpp"

struct mmb_dataset {
  mmb::Dataset data;
  std::string config_echo;
};

struct mmb_model {
  mmb::Model model;
  mmb::RunConfig config;
  std::string config_echo;
  int epoch = 0;
};

namespace {

thread_local std::string t_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

mmb_status fail(mmb_status status, const std::string& message) {
  t_last_error = message;
  return status;
}

mmb_status from_kind(mmb::ErrorKind kind) {
  switch (kind) {
    case mmb::ErrorKind::Validation: return MMB_ERR_VALIDATION;
    case mmb::ErrorKind::Numeric: return MMB_ERR_NUMERIC;
    case mmb::ErrorKind::Io: return MMB_ERR_IO;
  }
  return MMB_ERR_INTERNAL;
}

template <class Fn>
mmb_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return MMB_OK;
  } catch (const mmb::Error& e) {
    return fail(from_kind(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail(MMB_ERR_INTERNAL, e.what());
  }
}

std::string resolve_echo(const char* base_json, const char* overrides_json) {
  const std::string base =
      (base_json && *base_json) ? base_json : std::string("{}");
  const std::string overrides =
      (overrides_json && *overrides_json) ? overrides_json : std::string("{}");
  return mmb::config_to_json(mmb::parse_config(base, overrides));
}

std::vector<int> parse_int_list(const char* csv, const char* what) {
  if (!csv || !*csv)
    throw mmb::ValidationError(std::string(what) + ": empty list");
  std::vector<int> out;
  std::string token;
  for (const char* p = csv;; ++p) {
    if (*p == ',' || *p == '\0') {
      if (token.empty())
        throw mmb::ValidationError(std::string(what) + ": empty entry");
      try {
        out.push_back(std::stoi(token));
      } catch (const std::exception&) {
        throw mmb::ValidationError(std::string(what) + ": bad entry '" +
                                   token + "'");
      }
      token.clear();
      if (*p == '\0') break;
    } else {
      token.push_back(*p);
    }
  }
  return out;
}

mmb::EpochCallback progress_printer(int progress, const char* prefix) {
  if (!progress) return nullptr;
  std::string tag(prefix);
  return [tag](const mmb::MetricsRow& row) {
    std::cerr << tag << "epoch " << row.epoch << "  l_total "
              << row.l_total;
    if (row.l_save) std::cerr << "  l_save " << *row.l_save;
    if (row.l_bridge) std::cerr << "  l_bridge " << *row.l_bridge;
    if (row.acc_recall) std::cerr << "  acc_recall " << *row.acc_recall;
    if (row.acc_baseline) std::cerr << "  acc_baseline " << *row.acc_baseline;
    std::cerr << "\n";
  };
}

}  // namespace

extern "C" {

const char* mmb_version(void) { return "1.0.0"; }

const char* mmb_last_error(void) { return t_last_error.c_str(); }

void mmb_string_free(char* s) { std::free(s); }

mmb_status mmb_config_resolve(const char* base_json, const char* overrides_json,
                              char** effective_json_out) {
  return guarded([&]() {
    put_string(effective_json_out, resolve_echo(base_json, overrides_json));
  });
}

mmb_status mmb_dataset_generate(const char* effective_config_json,
                                mmb_dataset** train_out, mmb_dataset** test_out) {
  return guarded([&]() {
    if (!train_out || !test_out)
      throw mmb::ValidationError("mmb_dataset_generate: null out-parameter");
    if (!effective_config_json)
      throw mmb::ValidationError("mmb_dataset_generate: null config");
    mmb::RunConfig config = mmb::parse_config(effective_config_json);
    const std::string echo = mmb::config_to_json(config);
    mmb::GeneratedData generated =
        mmb::generate_dataset(config.data, config.seed);
    *train_out = new mmb_dataset{std::move(generated.train), echo};
    *test_out = new mmb_dataset{std::move(generated.test), echo};
  });
}

mmb_status mmb_dataset_save(const mmb_dataset* dataset, const char* path) {
  return guarded([&]() {
    if (!dataset || !path)
      throw mmb::ValidationError("mmb_dataset_save: null argument");
    mmb::save_dataset(dataset->data, path, dataset->config_echo);
  });
}

mmb_status mmb_dataset_open(const char* path, mmb_dataset** out) {
  return guarded([&]() {
    if (!out || !path)
      throw mmb::ValidationError("mmb_dataset_open: null argument");
    mmb::LoadedDataset loaded = mmb::load_dataset(path);
    *out = new mmb_dataset{std::move(loaded.dataset),
                           std::move(loaded.config_echo_json)};
  });
}

void mmb_dataset_close(mmb_dataset* dataset) { delete dataset; }

mmb_status mmb_dataset_summary(const mmb_dataset* train, const mmb_dataset* test,
                               char** json_out) {
  return guarded([&]() {
    if (!train || !test)
      throw mmb::ValidationError("mmb_dataset_summary: null dataset");
    nlohmann::ordered_json doc;
    doc["train_samples"] = train->data.samples.size();
    doc["test_samples"] = test->data.samples.size();
    doc["num_classes"] = train->data.spec.num_classes;
    doc["seq_len"] = train->data.spec.seq_len;
    doc["src_dim"] = train->data.spec.src_dim;
    doc["tgt_dim"] = train->data.spec.tgt_dim;
    doc["centroid_oracle_acc_source"] =
        mmb::centroid_accuracy(train->data, test->data, /*use_target=*/false);
    doc["centroid_oracle_acc_target"] =
        mmb::centroid_accuracy(train->data, test->data, /*use_target=*/true);
    doc["config"] = nlohmann::ordered_json::parse(train->config_echo);
    put_string(json_out, doc.dump());
  });
}

mmb_status mmb_train(const char* effective_config_json, const mmb_dataset* train,
                     const mmb_dataset* test, const char* checkpoint_path,
                     const char* metrics_csv_path, int progress,
                     char** summary_json_out) {
  return guarded([&]() {
    if (!effective_config_json || !train || !test)
      throw mmb::ValidationError("mmb_train: null argument");
    mmb::RunConfig config = mmb::parse_config(effective_config_json);
    const std::string echo = mmb::config_to_json(config);

    mmb::TrainResult result = mmb::train_model(
        config, train->data, test->data, progress_printer(progress, "train: "));

    if (checkpoint_path)
      mmb::save_checkpoint(result.model, echo, config.train.epochs,
                           checkpoint_path);
    if (metrics_csv_path) {
      std::ofstream out(metrics_csv_path, std::ios::trunc);
      if (!out)
        throw mmb::IoError(std::string("cannot write metrics to '") +
                           metrics_csv_path + "'");
      out << result.log.to_csv(echo);
    }

    nlohmann::ordered_json doc;
    doc["epochs"] = config.train.epochs;
    doc["slots"] = config.model.slots;
    if (!result.log.rows.empty()) {
      const mmb::MetricsRow& last = result.log.rows.back();
      doc["final_l_total"] = last.l_total;
      doc["final_l_task"] = last.l_task;
      if (last.l_save) doc["final_l_save"] = *last.l_save;
      if (last.l_bridge) doc["final_l_bridge"] = *last.l_bridge;
      if (last.acc_recall) doc["acc_recall"] = *last.acc_recall;
      if (last.acc_oracle) doc["acc_oracle"] = *last.acc_oracle;
      if (last.acc_baseline) doc["acc_baseline"] = *last.acc_baseline;
      if (last.recall_fidelity) doc["recall_fidelity"] = *last.recall_fidelity;
    }
    put_string(summary_json_out, doc.dump());
  });
}

mmb_status mmb_model_open(const char* checkpoint_path, mmb_model** out) {
  return guarded([&]() {
    if (!out || !checkpoint_path)
      throw mmb::ValidationError("mmb_model_open: null argument");
    mmb::LoadedCheckpoint loaded = mmb::load_checkpoint(checkpoint_path);
    *out = new mmb_model{std::move(loaded.model), std::move(loaded.config),
                         std::move(loaded.config_echo_json), loaded.epoch};
  });
}

void mmb_model_close(mmb_model* model) { delete model; }

mmb_status mmb_model_config(const mmb_model* model, char** config_json_out) {
  return guarded([&]() {
    if (!model) throw mmb::ValidationError("mmb_model_config: null model");
    put_string(config_json_out, model->config_echo);
  });
}

mmb_status mmb_evaluate(const mmb_model* model, const mmb_dataset* data,
                        const char* mode, char** report_json_out,
                        char** report_text_out, char** report_csv_out) {
  return guarded([&]() {
    if (!model || !data || !mode)
      throw mmb::ValidationError("mmb_evaluate: null argument");
    mmb::EvalDataSource source(data->data);
    mmb::EvalReport report =
        mmb::evaluate(model->model, source, mmb::eval_mode_from_string(mode));
    put_string(report_json_out, report.to_json());
    put_string(report_text_out, report.to_text(model->config_echo));
    put_string(report_csv_out, report.to_csv(model->config_echo));
  });
}

mmb_status mmb_analyze(const mmb_model* model, const mmb_dataset* data,
                       int max_per_class, char** report_text_out,
                       char** pairs_csv_out) {
  return guarded([&]() {
    if (!model || !data)
      throw mmb::ValidationError("mmb_analyze: null argument");
    mmb::SimilarityReport report = mmb::addressing_similarity(
        model->model, data->data, max_per_class > 0 ? max_per_class : 10);
    put_string(report_text_out, report.to_text(model->config_echo));
    put_string(pairs_csv_out, report.pairs_to_csv());
  });
}

mmb_status mmb_ablate(const char* effective_config_json, const mmb_dataset* train,
                      const mmb_dataset* test, const char* slots_csv,
                      const char* seeds_csv, int progress,
                      char** table_text_out, char** table_csv_out) {
  return guarded([&]() {
    if (!effective_config_json || !train || !test)
      throw mmb::ValidationError("mmb_ablate: null argument");
    mmb::RunConfig config = mmb::parse_config(effective_config_json);
    const std::string echo = mmb::config_to_json(config);
    std::vector<int> slots = parse_int_list(slots_csv, "ablate slots");
    std::vector<std::uint64_t> seeds;
    for (int s : parse_int_list(seeds_csv, "ablate seeds")) {
      if (s < 0) throw mmb::ValidationError("ablate seeds: negative seed");
      seeds.push_back(static_cast<std::uint64_t>(s));
    }
    mmb::AblationTable table =
        mmb::ablate_slots(config, slots, seeds, train->data, test->data,
                          progress_printer(progress, "ablate: "));
    put_string(table_text_out, table.to_text(echo));
    put_string(table_csv_out, table.to_csv(echo));
  });
}

mmb_status mmb_gradcheck(uint64_t seed, int num_seeds, int max_dim,
                         char** report_text_out, int* all_passed_out) {
  return guarded([&]() {
    mmb::GradCheckSuite suite =
        mmb::run_gradcheck_suite(seed, num_seeds, max_dim);
    put_string(report_text_out, suite.to_text());
    if (all_passed_out) *all_passed_out = suite.all_passed ? 1 : 0;
  });
}

}  // extern "C"
