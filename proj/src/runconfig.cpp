#include "glmr/runconfig.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace glmr::cli {

RunConfig reference_defaults() {
  RunConfig c;
  c.model.d = 256;
  c.model.mol_layers = 4;
  c.model.spec_layers = 6;
  c.model.dec_layers = 4;
  c.model.heads = 4;
  c.model.max_mol_tokens = 512;
  c.model.max_peaks = 61;
  c.contrastive.tau = 0.1;
  c.contrastive.n_spec_negatives = 1;
  c.contrastive.m_mol_negatives = 1;
  c.contrastive.epochs = 300;
  c.index.k = 40;
  c.beam.beam_width = 5;
  c.beam.max_length = 512;
  c.gen.epochs = 30;
  c.gen.k = 40;
  c.gen.max_length = 512;
  c.opt.learning_rate = 1e-4;
  c.opt.weight_decay = 0.1;
  return c;
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      std::size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    auto u = [&value] { return static_cast<std::size_t>(std::stoull(value)); };
    auto d = [&value] { return std::stod(value); };
    if (key == "seed") {
      base.seed = std::stoull(value);
      base.contrastive.seed = base.seed;
      base.gen.seed = base.seed;
    } else if (key == "d") base.model.d = u();
    else if (key == "heads") base.model.heads = u();
    else if (key == "mol_layers") base.model.mol_layers = u();
    else if (key == "spec_layers") base.model.spec_layers = u();
    else if (key == "dec_layers") base.model.dec_layers = u();
    else if (key == "max_peaks") base.model.max_peaks = u();
    else if (key == "max_mol_tokens") base.model.max_mol_tokens = u();
    else if (key == "tau") base.contrastive.tau = d();
    else if (key == "n_negatives") base.contrastive.n_spec_negatives = static_cast<int>(u());
    else if (key == "m_negatives") base.contrastive.m_mol_negatives = static_cast<int>(u());
    else if (key == "batch_size") base.contrastive.batch_size = u();
    else if (key == "align_epochs") base.contrastive.epochs = u();
    else if (key == "perturb_strength") base.contrastive.perturb_strength = d();
    else if (key == "k") { base.index.k = u(); base.gen.k = u(); }
    else if (key == "mass_tolerance") base.index.mass_tolerance = d();
    else if (key == "beam_width") base.beam.beam_width = u();
    else if (key == "max_length") { base.beam.max_length = u(); base.gen.max_length = u(); }
    else if (key == "gen_epochs") base.gen.epochs = u();
    else if (key == "lr") base.opt.learning_rate = d();
    else if (key == "weight_decay") base.opt.weight_decay = d();
    else if (key == "beta1") base.opt.beta1 = d();
    else if (key == "beta2") base.opt.beta2 = d();
    else if (key == "epsilon") base.opt.epsilon = d();
    else throw UnknownKey("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, std::move(base));
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["d"] = c.model.d;
  j["heads"] = c.model.heads;
  j["mol_layers"] = c.model.mol_layers;
  j["spec_layers"] = c.model.spec_layers;
  j["dec_layers"] = c.model.dec_layers;
  j["max_peaks"] = c.model.max_peaks;
  j["max_mol_tokens"] = c.model.max_mol_tokens;
  j["tau"] = c.contrastive.tau;
  j["n_negatives"] = c.contrastive.n_spec_negatives;
  j["m_negatives"] = c.contrastive.m_mol_negatives;
  j["batch_size"] = c.contrastive.batch_size;
  j["align_epochs"] = c.contrastive.epochs;
  j["perturb_strength"] = c.contrastive.perturb_strength;
  j["k"] = c.index.k;
  j["mass_tolerance"] = c.index.mass_tolerance;
  j["beam_width"] = c.beam.beam_width;
  j["max_length"] = c.beam.max_length;
  j["gen_epochs"] = c.gen.epochs;
  j["lr"] = c.opt.learning_rate;
  j["weight_decay"] = c.opt.weight_decay;
  j["beta1"] = c.opt.beta1;
  j["beta2"] = c.opt.beta2;
  j["epsilon"] = c.opt.epsilon;
  return j.dump(2);
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for checksum: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  return h;
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw ConfigError("write failed: " + tmp);
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("rename failed: " + path);
}

std::string manifest_json(const std::map<std::string, std::string>& input_paths,
                          const RunConfig& config) {
  nlohmann::json j;
  j["version"] = "1.0";
  auto& inputs = j["inputs"] = nlohmann::json::object();
  for (const auto& [label, path] : input_paths) {
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(file_checksum(path)));
    inputs[label] = {{"path", path}, {"fnv1a", hex}};
  }
  j["config"] = nlohmann::json::parse(config_to_json(config));
  const char* threads = std::getenv("GLMR_THREADS");
  j["threads"] = threads ? std::atoi(threads) : 1;
  return j.dump(2) + "\n";
}

}  // namespace glmr::cli
