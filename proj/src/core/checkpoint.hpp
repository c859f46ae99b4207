#pragma once

#include <string>

#include "core/config.hpp"
#include "core/model.hpp"

namespace mmb {

// Binary checkpoint container: magic, format version, effective config
// echo, epoch counter, named parameter records (shape + raw doubles,
// little-endian), trailing CRC32. Round-trips restore every parameter bit
// for bit.
void save_checkpoint(const Model& model, const std::string& config_echo_json,
                     int epoch, const std::string& path);

struct LoadedCheckpoint {
  Model model;
  RunConfig config;
  std::string config_echo_json;
  int epoch = 0;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace mmb
