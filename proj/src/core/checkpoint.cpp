#include "core/checkpoint.hpp"

#include <cstring>

#include "core/binio.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace mmb {

namespace {

constexpr char kMagic[4] = {'M', 'M', 'B', 'C'};
constexpr std::uint32_t kFormatVersion = 1;

}  // namespace

void save_checkpoint(const Model& model, const std::string& config_echo_json,
                     int epoch, const std::string& path) {
  BinWriter w(path);
  w.bytes(kMagic, 4);
  w.u32(kFormatVersion);
  w.str(config_echo_json);
  w.u32(static_cast<std::uint32_t>(epoch));
  w.u32(static_cast<std::uint32_t>(model.src_dim));
  w.u32(static_cast<std::uint32_t>(model.tgt_dim));
  w.u32(static_cast<std::uint32_t>(model.num_classes));

  const auto params = model.parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, tensor] : params) {
    w.str(name);
    w.u8(static_cast<std::uint8_t>(tensor->rank()));
    for (int d : tensor->shape) w.u32(static_cast<std::uint32_t>(d));
    for (double v : *tensor->data) w.f64(v);
  }
  w.finish_with_crc();
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  BinReader r(path);
  r.verify_trailing_crc();
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("'" + path + "' is not a checkpoint file");
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw IoError("unsupported checkpoint format version " +
                   std::to_string(version) + " in '" + path + "'");

  LoadedCheckpoint out;
  out.config_echo_json = r.str();
  out.config = parse_config(out.config_echo_json);
  out.epoch = static_cast<int>(r.u32());
  const int src_dim = static_cast<int>(r.u32());
  const int tgt_dim = static_cast<int>(r.u32());
  const int num_classes = static_cast<int>(r.u32());

  out.model = Model::init(out.config.model, src_dim, tgt_dim, num_classes,
                          derive_seed(out.config.seed, "model_init"));
  auto params = out.model.parameters();
  const std::uint32_t count = r.u32();
  if (count != params.size())
    throw IoError("checkpoint '" + path + "' carries " + std::to_string(count) +
                   " parameters, expected " + std::to_string(params.size()));
  for (auto& [name, tensor] : params) {
    const std::string stored = r.str();
    if (stored != name)
      throw IoError("checkpoint '" + path + "': parameter '" + stored +
                     "' where '" + name + "' was expected");
    const int rank = r.u8();
    if (rank != tensor->rank())
      throw IoError("checkpoint '" + path + "': rank mismatch for '" + name + "'");
    for (int d : tensor->shape) {
      const std::uint32_t stored_dim = r.u32();
      if (static_cast<int>(stored_dim) != d)
        throw IoError("checkpoint '" + path + "': shape mismatch for '" + name +
                       "'");
    }
    for (double& v : *tensor->data) v = r.f64();
  }
  if (!r.at_payload_end())
    throw IoError("trailing bytes in checkpoint '" + path + "'");
  return out;
}

}  // namespace mmb
