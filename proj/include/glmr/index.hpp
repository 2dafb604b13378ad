#pragma once
// Candidate-library construction with weight/formula filtering and cosine
// top-K pre-retrieval.

#include <string>
#include <vector>

#include "glmr/encoders.hpp"
#include "glmr/spectra.hpp"

namespace glmr::index {

struct IndexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroVector : IndexError {
  using IndexError::IndexError;
};
struct EmptyCandidateSet : IndexError {
  using IndexError::IndexError;
};
struct ChecksumMismatch : IndexError {
  using IndexError::IndexError;
};

struct IndexConfig {
  std::size_t k = 40;
  double mass_tolerance = 0.5;  // Da, absolute
};

enum class FilterMode { Weight, Formula, None };

struct RankedEntry {
  std::size_t record_id;
  double score;
};
using RankedList = std::vector<RankedEntry>;  // score descending

struct RetrievalLibrary {
  std::vector<spectra::MoleculeRecord> records;
  std::vector<std::vector<double>> embeddings;  // |lib| rows of width d
  std::size_t d = 0;
  std::uint64_t gamma_checksum = 0;
  // mass index: (parent_mass, id) sorted; formula index: string -> ids
  std::vector<std::pair<double, std::size_t>> mass_index;
  std::map<std::string, std::vector<std::size_t>> formula_index;

  void build_indexes();
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

RetrievalLibrary build_library(const std::vector<spectra::MoleculeRecord>& records,
                               const encoders::MolecularEncoder& enc,
                               const encoders::ModelConfig& config,
                               const ModelParams& params,
                               const smiles::Vocabulary& vocab);

std::vector<std::size_t> filter_by_weight(const RetrievalLibrary& lib, double query_mass,
                                          double tolerance);
std::vector<std::size_t> filter_by_formula(const RetrievalLibrary& lib,
                                           const std::map<std::string, int>& formula);

// Cosine-scored top-K over the filtered candidates; ties broken by canonical
// SMILES. `query_embedding` is the spectral embedding.
RankedList pre_retrieve(const std::vector<double>& query_embedding,
                        const RetrievalLibrary& lib,
                        const std::vector<std::size_t>& candidates, std::size_t k);

// Library persistence: TSV of records plus a sidecar embedding blob.
void save_library(const std::string& path_prefix, const RetrievalLibrary& lib);
RetrievalLibrary load_library(const std::string& path_prefix);

// Rank candidates by cosine against a fixed embedding (used by both
// pre-retrieval and re-ranking).
RankedList rank_by_cosine(const std::vector<double>& query,
                          const RetrievalLibrary& lib,
                          const std::vector<std::size_t>& candidates);

}  // namespace glmr::index
