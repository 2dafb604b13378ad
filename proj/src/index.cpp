#include "glmr/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "glmr/kernels.hpp"

namespace glmr::index {

void RetrievalLibrary::build_indexes() {
  mass_index.clear();
  formula_index.clear();
  for (std::size_t i = 0; i < records.size(); ++i) {
    mass_index.emplace_back(records[i].parent_mass, i);
    formula_index[smiles::formula_string(records[i].formula)].push_back(i);
  }
  std::sort(mass_index.begin(), mass_index.end());
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw IndexError("cosine: width mismatch");
  double na = kernels::dot(a.data(), a.data(), a.size());
  double nb = kernels::dot(b.data(), b.data(), b.size());
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine of zero vector");
  return kernels::dot(a.data(), b.data(), a.size()) / (std::sqrt(na) * std::sqrt(nb));
}

RetrievalLibrary build_library(const std::vector<spectra::MoleculeRecord>& records,
                               const encoders::MolecularEncoder& enc,
                               const encoders::ModelConfig& config,
                               const ModelParams& params,
                               const smiles::Vocabulary& vocab) {
  RetrievalLibrary lib;
  lib.records = records;
  lib.d = config.d;
  lib.gamma_checksum = params.checksum(encoders::kMolGroup);
  lib.embeddings.reserve(records.size());
  for (const auto& r : records) {
    auto ids = smiles::encode_string(r.canonical_smiles, vocab);
    auto enc_out = encoders::encode_molecule(ids, enc, config);
    lib.embeddings.push_back(enc_out.embedding->val);
  }
  lib.build_indexes();
  return lib;
}

std::vector<std::size_t> filter_by_weight(const RetrievalLibrary& lib, double query_mass,
                                          double tolerance) {
  auto lo = std::lower_bound(lib.mass_index.begin(), lib.mass_index.end(),
                             std::make_pair(query_mass - tolerance, std::size_t{0}));
  std::vector<std::size_t> out;
  for (auto it = lo; it != lib.mass_index.end() && it->first <= query_mass + tolerance; ++it)
    out.push_back(it->second);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> filter_by_formula(const RetrievalLibrary& lib,
                                           const std::map<std::string, int>& formula) {
  auto it = lib.formula_index.find(smiles::formula_string(formula));
  if (it == lib.formula_index.end()) return {};
  return it->second;
}

RankedList rank_by_cosine(const std::vector<double>& query, const RetrievalLibrary& lib,
                          const std::vector<std::size_t>& candidates) {
  RankedList ranked;
  ranked.reserve(candidates.size());
  for (std::size_t id : candidates)
    ranked.push_back({id, cosine(query, lib.embeddings[id])});
  std::sort(ranked.begin(), ranked.end(), [&lib](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return lib.records[a.record_id].canonical_smiles <
           lib.records[b.record_id].canonical_smiles;
  });
  return ranked;
}

RankedList pre_retrieve(const std::vector<double>& query_embedding,
                        const RetrievalLibrary& lib,
                        const std::vector<std::size_t>& candidates, std::size_t k) {
  if (candidates.empty()) throw EmptyCandidateSet("no candidates after filtering");
  RankedList ranked = rank_by_cosine(query_embedding, lib, candidates);
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

void save_library(const std::string& path_prefix, const RetrievalLibrary& lib) {
  {
    std::ofstream tsv(path_prefix + ".tsv");
    if (!tsv) throw IndexError("cannot write library tsv");
    tsv << "canonical_smiles\tformula\tparent_mass\n";
    char buf[40];
    for (const auto& r : lib.records) {
      std::snprintf(buf, sizeof buf, "%.17g", r.parent_mass);
      tsv << r.canonical_smiles << '\t' << smiles::formula_string(r.formula) << '\t'
          << buf << '\n';
    }
  }
  nlohmann::json manifest;
  manifest["d"] = lib.d;
  manifest["count"] = lib.records.size();
  manifest["gamma_checksum"] = lib.gamma_checksum;
  std::string mtext = manifest.dump();
  std::ofstream blob(path_prefix + ".emb", std::ios::binary);
  if (!blob) throw IndexError("cannot write library embeddings");
  std::uint64_t mlen = mtext.size();
  blob.write(reinterpret_cast<const char*>(&mlen), 8);
  blob.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));
  for (const auto& e : lib.embeddings)
    blob.write(reinterpret_cast<const char*>(e.data()),
               static_cast<std::streamsize>(e.size() * sizeof(double)));
}

RetrievalLibrary load_library(const std::string& path_prefix) {
  RetrievalLibrary lib;
  std::ifstream tsv(path_prefix + ".tsv");
  if (!tsv) throw IndexError("cannot open library tsv: " + path_prefix + ".tsv");
  std::string line;
  std::getline(tsv, line);  // header
  while (std::getline(tsv, line)) {
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw IndexError("malformed library tsv row");
    lib.records.push_back(spectra::make_record(line.substr(0, t1)));
  }
  std::ifstream blob(path_prefix + ".emb", std::ios::binary);
  if (!blob) throw IndexError("cannot open library embeddings");
  std::uint64_t mlen = 0;
  blob.read(reinterpret_cast<char*>(&mlen), 8);
  std::string mtext(mlen, '\0');
  blob.read(mtext.data(), static_cast<std::streamsize>(mlen));
  nlohmann::json manifest = nlohmann::json::parse(mtext);
  lib.d = manifest["d"].get<std::size_t>();
  lib.gamma_checksum = manifest["gamma_checksum"].get<std::uint64_t>();
  std::size_t count = manifest["count"].get<std::size_t>();
  if (count != lib.records.size())
    throw IndexError("library tsv/embedding count mismatch");
  lib.embeddings.assign(count, std::vector<double>(lib.d));
  for (auto& e : lib.embeddings) {
    blob.read(reinterpret_cast<char*>(e.data()),
              static_cast<std::streamsize>(e.size() * sizeof(double)));
    if (!blob) throw IndexError("truncated embedding blob");
  }
  lib.build_indexes();
  return lib;
}

}  // namespace glmr::index
