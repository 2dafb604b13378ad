#pragma once
// Molecular and spectral encoders: token/peak embedding, transformer stacks,
// CLS extraction and mean pooling.

#include <vector>

#include "glmr/nn.hpp"
#include "glmr/smiles.hpp"
#include "glmr/spectra.hpp"
#include "glmr/tensor.hpp"

namespace glmr::encoders {

struct EncodersError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SequenceTooLong : EncodersError {
  using EncodersError::EncodersError;
};
struct TooManyPeaks : EncodersError {
  using EncodersError::EncodersError;
};
struct NotNormalized : EncodersError {
  using EncodersError::EncodersError;
};

struct ModelConfig {
  std::size_t d = 64;           // full-scale: 256
  std::size_t mol_layers = 4;
  std::size_t spec_layers = 6;
  std::size_t dec_layers = 4;
  std::size_t heads = 4;
  std::size_t max_mol_tokens = 512;
  std::size_t max_peaks = 61;
  std::size_t vocab_size = 0;   // derived from the tokenizer vocabulary

  void validate() const {
    if (d == 0 || heads == 0 || d % heads != 0)
      throw EncodersError("d must be a positive multiple of heads");
    if (mol_layers < 1 || spec_layers < 1 || dec_layers < 1)
      throw EncodersError("layer counts must be >= 1");
  }
};

// Parameter group names used across the pipeline.
inline constexpr const char* kMolGroup = "molecular_encoder";
inline constexpr const char* kSpecGroup = "spectral_encoder";
inline constexpr const char* kFusionGroup = "fusion";
inline constexpr const char* kDecoderGroup = "decoder";

// Handles to the molecular encoder parameters (group gamma).
struct MolecularEncoder {
  TensorPtr token_embedding;  // vocab x d
  TensorPtr cls;              // 1 x d, learned
  std::vector<nn::EncoderLayerP> layers;
  nn::LayerNormP final_norm;
};

// Handles to the spectral encoder parameters (group eta).
struct SpectralEncoder {
  nn::LinearP peak_proj;  // 2 -> d affine on (mz/1000, intensity)
  std::vector<nn::EncoderLayerP> layers;
  nn::LayerNormP final_norm;
};

MolecularEncoder make_molecular_encoder(ModelParams& params, const ModelConfig& config,
                                        Rng& rng);
SpectralEncoder make_spectral_encoder(ModelParams& params, const ModelConfig& config,
                                      Rng& rng);

struct Encoded {
  TensorPtr hidden;     // T x d (row 0 is CLS for molecules)
  TensorPtr embedding;  // 1 x d
  std::size_t valid_rows = 0;
};

// CLS prepended, sinusoidal positions added, bidirectional self-attention.
// `pad_to`, when > token count + 1, appends PAD rows that are masked out of
// attention; the embedding must not change.
Encoded encode_molecule(const std::vector<int>& token_ids, const MolecularEncoder& enc,
                        const ModelConfig& config, std::size_t pad_to = 0);

// Peaks projected via an affine map, no positional encoding (set semantics),
// mean pooling over valid rows.
Encoded encode_spectrum(const spectra::Spectrum& s, const SpectralEncoder& enc,
                        const ModelConfig& config);

}  // namespace glmr::encoders
