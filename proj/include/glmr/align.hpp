#pragma once
// Stage-1 contrastive training: dual-path InfoNCE with perturbation-based
// spectral negatives and in-batch molecular negatives. Trains the spectral
// encoder while the molecular encoder stays frozen.

#include <vector>

#include "glmr/encoders.hpp"
#include "glmr/spectra.hpp"
#include "glmr/tensor.hpp"

namespace glmr::align {

struct AlignError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WidthMismatch : AlignError {
  using AlignError::AlignError;
};
struct BatchTooSmall : AlignError {
  using AlignError::AlignError;
};

struct ContrastiveConfig {
  double tau = 0.1;
  int n_spec_negatives = 1;    // N
  int m_mol_negatives = 1;     // M
  std::size_t batch_size = 16;
  std::size_t epochs = 200;    // desk-scale; full-scale runs use 300
  std::uint64_t seed = 1;
  double perturb_strength = 0.3;
};

// Temperature-scaled InfoNCE for one anchor: the positive is included in the
// denominator alongside the negatives. All embeddings 1 x d.
TensorPtr info_nce(const TensorPtr& anchor, const TensorPtr& positive,
                   const std::vector<TensorPtr>& negatives, double tau);

// Batch means of the two directional losses.
TensorPtr loss_mol2ms(const std::vector<TensorPtr>& mol_embs,
                      const std::vector<TensorPtr>& spec_embs,
                      const std::vector<std::vector<TensorPtr>>& spec_negatives,
                      double tau);
TensorPtr loss_ms2mol(const std::vector<TensorPtr>& spec_embs,
                      const std::vector<TensorPtr>& mol_embs,
                      const std::vector<std::vector<std::size_t>>& mol_negative_ids,
                      double tau);
TensorPtr pre_loss(const TensorPtr& l_ms2mol, const TensorPtr& l_mol2ms);

struct TrainPair {
  std::vector<int> mol_tokens;  // vocabulary ids, no specials
  spectra::Spectrum spectrum;   // normalized
};

struct LossRow {
  std::size_t step;
  double ms2mol, mol2ms, pre;
};

struct AlignResult {
  std::vector<LossRow> curve;  // one row per optimizer step
};

// Runs the contrastive stage. The molecular group is frozen for the duration
// (restored to its prior flag afterwards); eta is updated in place.
AlignResult train_align(const std::vector<TrainPair>& data, const ContrastiveConfig& config,
                        const OptimizerConfig& opt, ModelParams& params,
                        const encoders::MolecularEncoder& mol_enc,
                        const encoders::SpectralEncoder& spec_enc,
                        const encoders::ModelConfig& model_config);

void write_loss_csv(std::ostream& out, const std::vector<LossRow>& curve);

}  // namespace glmr::align
