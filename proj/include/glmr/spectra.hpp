#pragma once
// Spectrum data model, MGF/TSV ingestion, intensity normalization,
// perturbation-based negatives and a deterministic synthetic fragmenter.

#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "glmr/smiles.hpp"
#include "glmr/tensor.hpp"

namespace glmr::spectra {

struct SpectraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySpectrum : SpectraError {
  using SpectraError::SpectraError;
};
struct NonPositiveIntensity : SpectraError {
  using SpectraError::SpectraError;
};

struct Peak {
  double mz;
  double intensity;  // in (0,1] after normalization
};

constexpr std::size_t kDefaultMaxPeaks = 61;

struct SpectrumMetadata {
  std::string identifier;
  double precursor_mz = 0.0;
  std::string precursor_formula;
  std::string adduct;
  std::string instrument_type;
  double collision_energy = 0.0;
  std::string smiles;  // ground-truth pairing, may be empty at inference
};

struct Spectrum {
  std::vector<Peak> peaks;  // sorted by mz ascending, strictly increasing
  SpectrumMetadata metadata;
};

struct MoleculeRecord {
  std::string smiles;
  std::string canonical_smiles;
  smiles::MolGraph graph;
  std::map<std::string, int> formula;
  double parent_mass = 0.0;
};

MoleculeRecord make_record(const std::string& smiles_text);

// Divide by the maximum intensity; sort by mz; keep the top `max_peaks`
// by intensity when longer.
Spectrum normalize_intensities(const std::vector<Peak>& raw,
                               std::size_t max_peaks = kDefaultMaxPeaks);
bool is_normalized(const Spectrum& s);

// ---- MGF ----

struct ParseIssue {
  std::size_t line;
  std::string message;
};

struct MgfResult {
  std::vector<Spectrum> spectra;
  std::vector<ParseIssue> issues;  // malformed blocks, reported not fatal
};

MgfResult parse_mgf(std::istream& in);

// ---- dataset table (TSV, one row per spectrum) ----

struct DatasetRow {
  Spectrum spectrum;
  std::string smiles;
  std::string formula;
  double parent_mass = 0.0;
};

struct TableResult {
  std::vector<DatasetRow> rows;
  std::vector<ParseIssue> issues;
};

extern const std::vector<std::string> kTableColumns;

TableResult parse_dataset_table(std::istream& in);
void write_dataset_table(std::ostream& out, const std::vector<DatasetRow>& rows);

// Drop records whose canonical SMILES appears in `training`; order preserved.
std::vector<MoleculeRecord> dedup_against(const std::set<std::string>& training_canonical,
                                          const std::vector<MoleculeRecord>& candidates);

// Multiply each intensity by a seeded uniform factor in [1-strength, 1+strength],
// then re-normalize. Peak count and mz list are preserved exactly.
Spectrum perturb_spectrum(const Spectrum& s, std::uint64_t seed, double strength = 0.3);

// Deterministic pseudo-fragmentation: one peak per fragment from cleaving each
// acyclic single bond, intensity proportional to fragment atom count, plus the
// precursor peak at parent mass.
Spectrum synth_fragment_spectrum(const MoleculeRecord& m,
                                 std::size_t max_peaks = kDefaultMaxPeaks);

}  // namespace glmr::spectra
