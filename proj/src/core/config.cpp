#include "core/config.hpp"

#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "core/errors.hpp"

namespace mmb {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key))
      throw ValidationError("config: unknown key '" + where + key + "'");
}

template <class T>
void take(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config: bad value for '") + key + "'");
  }
}

void apply_data(const json& obj, DataConfig& c) {
  reject_unknown(obj,
                 {"num_classes", "codebook_size", "seq_len", "code_dim",
                  "src_dim", "tgt_dim", "noise_src", "noise_tgt",
                  "train_per_class", "test_per_class", "speaker_jitter"},
                 "data.");
  take(obj, "num_classes", c.num_classes);
  take(obj, "codebook_size", c.codebook_size);
  take(obj, "seq_len", c.seq_len);
  take(obj, "code_dim", c.code_dim);
  take(obj, "src_dim", c.src_dim);
  take(obj, "tgt_dim", c.tgt_dim);
  take(obj, "noise_src", c.noise_src);
  take(obj, "noise_tgt", c.noise_tgt);
  take(obj, "train_per_class", c.train_per_class);
  take(obj, "test_per_class", c.test_per_class);
  take(obj, "speaker_jitter", c.speaker_jitter);
}

void apply_model(const json& obj, ModelConfig& c) {
  reject_unknown(obj,
                 {"slots", "scale", "src_feat_dim", "tgt_feat_dim",
                  "hidden_dim", "fusion_dim", "detach_target_addressing",
                  "detach_save", "share_head"},
                 "model.");
  take(obj, "slots", c.slots);
  take(obj, "scale", c.scale);
  take(obj, "src_feat_dim", c.src_feat_dim);
  take(obj, "tgt_feat_dim", c.tgt_feat_dim);
  take(obj, "hidden_dim", c.hidden_dim);
  take(obj, "fusion_dim", c.fusion_dim);
  take(obj, "detach_target_addressing", c.detach_target_addressing);
  take(obj, "detach_save", c.detach_save);
  take(obj, "share_head", c.share_head);
}

void apply_train(const json& obj, TrainControl& c) {
  reject_unknown(obj,
                 {"optimizer", "learning_rate", "momentum", "batch_size",
                  "epochs", "eval_every"},
                 "train.");
  take(obj, "optimizer", c.optimizer);
  take(obj, "learning_rate", c.learning_rate);
  take(obj, "momentum", c.momentum);
  take(obj, "batch_size", c.batch_size);
  take(obj, "epochs", c.epochs);
  take(obj, "eval_every", c.eval_every);
}

void apply_document(const json& doc, RunConfig& c) {
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");
  reject_unknown(doc, {"seed", "data", "model", "train"}, "");
  take(doc, "seed", c.seed);
  if (doc.contains("data")) apply_data(doc.at("data"), c.data);
  if (doc.contains("model")) apply_model(doc.at("model"), c.model);
  if (doc.contains("train")) apply_train(doc.at("train"), c.train);
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
}

}  // namespace

void DataConfig::validate(bool strict_noise) const {
  if (num_classes < 2) throw ValidationError("config: data.num_classes must be >= 2");
  if (codebook_size < 2)
    throw ValidationError("config: data.codebook_size must be >= 2");
  if (seq_len < 1) throw ValidationError("config: data.seq_len must be >= 1");
  if (code_dim < 1 || src_dim < 1 || tgt_dim < 1)
    throw ValidationError("config: data dims must be >= 1");
  if (noise_tgt < 0.0)
    throw ValidationError("config: data.noise_tgt must be >= 0");
  if (strict_noise && !(noise_src > noise_tgt))
    throw ValidationError(
        "config: data.noise_src must exceed data.noise_tgt (the source "
        "modality is the degraded one)");
  if (!strict_noise && noise_src < noise_tgt)
    throw ValidationError("config: data.noise_src must be >= data.noise_tgt");
  if (train_per_class < 1 || test_per_class < 1)
    throw ValidationError("config: per-class sample counts must be >= 1");
  // Enough distinct code sequences for the class count?
  double capacity = 1.0;
  for (int i = 0; i < seq_len && capacity <= 1e18; ++i) capacity *= codebook_size;
  if (static_cast<double>(num_classes) > capacity)
    throw ValidationError(
        "config: num_classes exceeds codebook_size^seq_len distinct sequences");
}

void ModelConfig::validate() const {
  if (slots < 0) throw ValidationError("config: model.slots must be >= 0");
  if (!(scale > 0.0)) throw ValidationError("config: model.scale must be > 0");
  if (src_feat_dim < 1 || tgt_feat_dim < 1 || hidden_dim < 1 || fusion_dim < 1)
    throw ValidationError("config: model dims must be >= 1");
}

void TrainControl::validate() const {
  if (optimizer != "adam" && optimizer != "sgd" && optimizer != "sgd_momentum")
    throw ValidationError("config: train.optimizer must be adam, sgd, or "
                          "sgd_momentum");
  if (!(learning_rate >= 0.0))
    throw ValidationError("config: train.learning_rate must be >= 0");
  if (momentum < 0.0 || momentum >= 1.0)
    throw ValidationError("config: train.momentum must be in [0, 1)");
  if (batch_size < 1) throw ValidationError("config: train.batch_size must be >= 1");
  if (epochs < 0) throw ValidationError("config: train.epochs must be >= 0");
  if (eval_every < 1) throw ValidationError("config: train.eval_every must be >= 1");
}

void RunConfig::validate() const {
  data.validate();
  model.validate();
  train.validate();
}

RunConfig parse_config(const std::string& json_text) {
  RunConfig c;
  apply_document(parse_document(json_text), c);
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& json_text,
                       const std::string& overrides_json) {
  RunConfig c;
  apply_document(parse_document(json_text), c);
  apply_document(parse_document(overrides_json), c);
  c.validate();
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json doc;
  doc["seed"] = c.seed;
  doc["data"] = {{"num_classes", c.data.num_classes},
                 {"codebook_size", c.data.codebook_size},
                 {"seq_len", c.data.seq_len},
                 {"code_dim", c.data.code_dim},
                 {"src_dim", c.data.src_dim},
                 {"tgt_dim", c.data.tgt_dim},
                 {"noise_src", c.data.noise_src},
                 {"noise_tgt", c.data.noise_tgt},
                 {"train_per_class", c.data.train_per_class},
                 {"test_per_class", c.data.test_per_class},
                 {"speaker_jitter", c.data.speaker_jitter}};
  doc["model"] = {{"slots", c.model.slots},
                  {"scale", c.model.scale},
                  {"src_feat_dim", c.model.src_feat_dim},
                  {"tgt_feat_dim", c.model.tgt_feat_dim},
                  {"hidden_dim", c.model.hidden_dim},
                  {"fusion_dim", c.model.fusion_dim},
                  {"detach_target_addressing", c.model.detach_target_addressing},
                  {"detach_save", c.model.detach_save},
                  {"share_head", c.model.share_head}};
  doc["train"] = {{"optimizer", c.train.optimizer},
                  {"learning_rate", c.train.learning_rate},
                  {"momentum", c.train.momentum},
                  {"batch_size", c.train.batch_size},
                  {"epochs", c.train.epochs},
                  {"eval_every", c.train.eval_every}};
  return doc.dump();
}

}  // namespace mmb
