#pragma once
// Checkpoint container: JSON manifest (format version, shapes, group names,
// freeze flags, seed, config echo) followed by raw little-endian f64 blobs
// per parameter, in manifest order.

#include <cstdint>
#include <string>

#include "glmr/tensor.hpp"

namespace glmr::checkpoint {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// `config_echo` is free-form JSON text echoed verbatim into the manifest.
void save(const std::string& path, const ModelParams& params, std::uint64_t seed,
          const std::string& config_echo_json);

struct Loaded {
  ModelParams params;
  std::uint64_t seed = 0;
  std::string config_echo_json;
};

// Load into a fresh ModelParams. Shapes come from the manifest.
Loaded load(const std::string& path);

// Load values into an existing parameter set; group/param names and shapes
// must match exactly.
void load_into(const std::string& path, ModelParams& params);

}  // namespace glmr::checkpoint
