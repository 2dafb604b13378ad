#pragma once
// Resolved run configuration shared by the command-line tool: defaults,
// key=value config files with unknown-key rejection, JSON echo for
// provenance manifests, and atomic output writing.

#include <iosfwd>
#include <map>
#include <string>

#include "glmr/align.hpp"
#include "glmr/encoders.hpp"
#include "glmr/genret.hpp"
#include "glmr/index.hpp"
#include "glmr/tensor.hpp"

namespace glmr::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownKey : ConfigError {
  using ConfigError::ConfigError;
};

struct RunConfig {
  encoders::ModelConfig model;
  align::ContrastiveConfig contrastive;
  index::IndexConfig index;
  genret::BeamConfig beam;
  genret::GenConfig gen;
  OptimizerConfig opt;
  std::uint64_t seed = 1;
};

// Published-scale defaults: d=256, 4/6/4 layers, 61 peaks, tau=0.1, N=M=1,
// K=40, beam width 5, max length 512, lr 1e-4, weight decay 0.1.
RunConfig reference_defaults();

// key=value lines over `base`; '#' comments and blank lines ignored;
// unknown keys throw UnknownKey.
RunConfig parse_config(std::istream& in, RunConfig base);
RunConfig parse_config_file(const std::string& path, RunConfig base);

std::string config_to_json(const RunConfig& c);

// FNV-1a over the raw bytes of a file.
std::uint64_t file_checksum(const std::string& path);

// write-temp-then-rename
void atomic_write(const std::string& path, const std::string& content);

// {"version", "inputs": {path: checksum hex}, "config": echo, "threads"}
std::string manifest_json(const std::map<std::string, std::string>& input_paths,
                          const RunConfig& config);

}  // namespace glmr::cli
