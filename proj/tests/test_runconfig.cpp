#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "glmr/runconfig.hpp"

using namespace glmr;
using namespace glmr::cli;

TEST_CASE("published-scale defaults") {
  RunConfig c = reference_defaults();
  CHECK(c.model.d == 256);
  CHECK(c.model.mol_layers == 4);
  CHECK(c.model.spec_layers == 6);
  CHECK(c.model.dec_layers == 4);
  CHECK(c.model.max_peaks == 61);
  CHECK(c.model.max_mol_tokens == 512);
  CHECK(c.contrastive.tau == 0.1);
  CHECK(c.contrastive.n_spec_negatives == 1);
  CHECK(c.contrastive.m_mol_negatives == 1);
  CHECK(c.index.k == 40);
  CHECK(c.gen.k == 40);
  CHECK(c.beam.beam_width == 5);
  CHECK(c.beam.max_length == 512);
  CHECK(c.gen.max_length == 512);
  CHECK(c.opt.learning_rate == 1e-4);
  CHECK(c.opt.weight_decay == 0.1);
}

TEST_CASE("key=value overlay") {
  std::istringstream in(
      "# model size\n"
      "d = 64\n"
      "heads=2\n"
      "\n"
      "tau = 0.25   # temperature\n"
      "k = 8\n"
      "max_length = 32\n"
      "seed = 99\n");
  RunConfig c = parse_config(in, reference_defaults());
  CHECK(c.model.d == 64);
  CHECK(c.model.heads == 2);
  CHECK(c.contrastive.tau == 0.25);
  CHECK(c.index.k == 8);
  CHECK(c.gen.k == 8);        // shared key updates both stages
  CHECK(c.beam.max_length == 32);
  CHECK(c.gen.max_length == 32);
  CHECK(c.seed == 99);
  CHECK(c.contrastive.seed == 99);
  CHECK(c.gen.seed == 99);
  // untouched keys keep their defaults
  CHECK(c.model.spec_layers == 6);
  CHECK(c.opt.weight_decay == 0.1);
}

TEST_CASE("config errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, reference_defaults());
  };
  CHECK_THROWS_AS(parse("temperature = 0.1\n"), UnknownKey);
  CHECK_THROWS_AS(parse("dd=1\n"), UnknownKey);
  CHECK_THROWS_AS(parse("just a line\n"), ConfigError);
  CHECK_THROWS_AS(parse("d =\n"), ConfigError);
  CHECK_THROWS_AS(parse("= 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/config", reference_defaults()), ConfigError);
}

TEST_CASE("config echo covers every accepted key") {
  std::string json = config_to_json(reference_defaults());
  for (const char* key :
       {"seed", "d", "heads", "mol_layers", "spec_layers", "dec_layers", "max_peaks",
        "max_mol_tokens", "tau", "n_negatives", "m_negatives", "batch_size",
        "align_epochs", "perturb_strength", "k", "mass_tolerance", "beam_width",
        "max_length", "gen_epochs", "lr", "weight_decay", "beta1", "beta2", "epsilon"}) {
    CHECK(json.find(std::string("\"") + key + "\"") != std::string::npos);
  }
  CHECK(json.find("\"tau\": 0.1") != std::string::npos);
  CHECK(json.find("\"k\": 40") != std::string::npos);
}

TEST_CASE("file checksum and atomic write") {
  auto dir = std::filesystem::temp_directory_path() / "glmr_runconfig_test";
  std::filesystem::create_directories(dir);
  std::string path = (dir / "data.txt").string();

  atomic_write(path, "hello");
  {
    std::ifstream in(path);
    std::string got((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(got == "hello");
  }
  CHECK(!std::filesystem::exists(path + ".tmp"));  // temp file renamed away

  std::uint64_t h1 = file_checksum(path);
  CHECK(h1 == file_checksum(path));  // stable
  atomic_write(path, "hello!");
  CHECK(file_checksum(path) != h1);  // sensitive to content

  // overwrite replaces the old content completely
  atomic_write(path, "x");
  CHECK(file_checksum(path) != h1);
  std::ifstream in(path);
  std::string got((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(got == "x");

  CHECK_THROWS_AS(file_checksum((dir / "missing").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest embeds input checksums and the config echo") {
  auto dir = std::filesystem::temp_directory_path() / "glmr_manifest_test";
  std::filesystem::create_directories(dir);
  std::string input = (dir / "input.tsv").string();
  atomic_write(input, "a\tb\n");

  std::string m = manifest_json({{"dataset", input}}, reference_defaults());
  CHECK(m.find("\"version\"") != std::string::npos);
  CHECK(m.find("\"dataset\"") != std::string::npos);
  CHECK(m.find("\"fnv1a\"") != std::string::npos);
  CHECK(m.find("\"threads\"") != std::string::npos);
  CHECK(m.find("\"tau\": 0.1") != std::string::npos);
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(file_checksum(input)));
  CHECK(m.find(hex) != std::string::npos);
  std::filesystem::remove_all(dir);
}
