#include "glmr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace glmr::checkpoint {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian");

namespace {
constexpr char kMagic[8] = {'G', 'L', 'M', 'R', 'C', 'K', 'P', '1'};
}

void save(const std::string& path, const ModelParams& params, std::uint64_t seed,
          const std::string& config_echo_json) {
  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["seed"] = seed;
  manifest["step_count"] = params.step_count;
  if (!config_echo_json.empty())
    manifest["config"] = nlohmann::json::parse(config_echo_json);
  auto& groups = manifest["groups"] = nlohmann::json::array();
  for (const auto& g : params.groups) {
    nlohmann::json jg;
    jg["name"] = g.name;
    jg["frozen"] = g.frozen;
    auto& jparams = jg["params"] = nlohmann::json::array();
    for (const auto& p : g.params) {
      jparams.push_back({{"name", p.name},
                         {"rows", p.value->rows},
                         {"cols", p.value->cols}});
    }
    groups.push_back(jg);
  }
  std::string mtext = manifest.dump();
  std::ofstream out(path + ".tmp", std::ios::binary);
  if (!out) throw CheckpointError("cannot open for writing: " + path);
  out.write(kMagic, 8);
  std::uint64_t mlen = mtext.size();
  out.write(reinterpret_cast<const char*>(&mlen), 8);
  out.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));
  for (const auto& g : params.groups)
    for (const auto& p : g.params)
      out.write(reinterpret_cast<const char*>(p.value->val.data()),
                static_cast<std::streamsize>(p.value->size() * sizeof(double)));
  out.close();
  if (!out) throw CheckpointError("write failed: " + path);
  std::remove(path.c_str());
  if (std::rename((path + ".tmp").c_str(), path.c_str()) != 0)
    throw CheckpointError("rename failed: " + path);
}

namespace {

nlohmann::json read_manifest(std::ifstream& in, const std::string& path) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw CheckpointError("not a checkpoint file: " + path);
  std::uint64_t mlen = 0;
  in.read(reinterpret_cast<char*>(&mlen), 8);
  std::string mtext(mlen, '\0');
  in.read(mtext.data(), static_cast<std::streamsize>(mlen));
  if (!in) throw CheckpointError("truncated manifest: " + path);
  return nlohmann::json::parse(mtext);
}

void read_blob(std::ifstream& in, Tensor& t, const std::string& path) {
  in.read(reinterpret_cast<char*>(t.val.data()),
          static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (!in) throw CheckpointError("truncated parameter blob: " + path);
}

}  // namespace

Loaded load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open: " + path);
  nlohmann::json manifest = read_manifest(in, path);
  Loaded result;
  result.seed = manifest.value("seed", 0ull);
  if (manifest.contains("config")) result.config_echo_json = manifest["config"].dump();
  result.params.step_count = manifest.value("step_count", 0ll);
  for (const auto& jg : manifest["groups"]) {
    ParamGroup& g = result.params.group(jg["name"].get<std::string>());
    g.frozen = jg.value("frozen", false);
    for (const auto& jp : jg["params"]) {
      auto t = result.params.add(g.name, jp["name"].get<std::string>(),
                                 jp["rows"].get<std::size_t>(),
                                 jp["cols"].get<std::size_t>());
      read_blob(in, *t, path);
    }
  }
  return result;
}

void load_into(const std::string& path, ModelParams& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open: " + path);
  nlohmann::json manifest = read_manifest(in, path);
  for (const auto& jg : manifest["groups"]) {
    std::string gname = jg["name"].get<std::string>();
    ParamGroup* g = nullptr;
    for (auto& gg : params.groups)
      if (gg.name == gname) g = &gg;
    if (!g) throw CheckpointError("checkpoint group not in model: " + gname);
    std::size_t i = 0;
    for (const auto& jp : jg["params"]) {
      if (i >= g->params.size())
        throw CheckpointError("parameter count mismatch in group " + gname);
      Param& p = g->params[i++];
      if (p.name != jp["name"].get<std::string>() ||
          p.value->rows != jp["rows"].get<std::size_t>() ||
          p.value->cols != jp["cols"].get<std::size_t>())
        throw CheckpointError("parameter mismatch: " + gname + "/" + p.name);
      read_blob(in, *p.value, path);
    }
    if (i != g->params.size())
      throw CheckpointError("parameter count mismatch in group " + gname);
  }
}

}  // namespace glmr::checkpoint
