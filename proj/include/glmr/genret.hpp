#pragma once
// Stage-2 generative retrieval: cross-attention fusion of spectral and
// candidate hidden states, teacher-forced decoder training, beam-search
// generation and similarity re-ranking.

#include <functional>
#include <string>
#include <vector>

#include "glmr/encoders.hpp"
#include "glmr/index.hpp"
#include "glmr/tensor.hpp"

namespace glmr::genret {

struct GenretError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WidthMismatch : GenretError {
  using GenretError::GenretError;
};
struct SequenceTooLong : GenretError {
  using GenretError::GenretError;
};
struct NoParseableGeneration : GenretError {
  using GenretError::GenretError;
};

struct BeamConfig {
  std::size_t beam_width = 5;
  std::size_t max_length = 128;  // full-scale: 512
};

// Fusion parameters (group "fusion"): one multi-head cross-attention plus
// learned rank embeddings and a separator row for the candidate bank.
struct FusionParams {
  nn::MhaP attn;
  TensorPtr rank_embedding;  // max_rank x d, row r for rank r+1
  TensorPtr separator;       // 1 x d, prepended to each candidate block
  std::size_t max_rank = 0;
};

// Decoder parameters (group "decoder"): token embedding, causal
// self-attention layers with cross-attention to the fused memory, and an
// output projection to vocabulary logits.
struct DecoderParams {
  TensorPtr token_embedding;  // vocab x d
  std::vector<nn::DecoderLayerP> layers;
  nn::LayerNormP final_norm;
  nn::LinearP out_proj;  // d -> vocab
};

FusionParams make_fusion(ModelParams& params, const encoders::ModelConfig& config,
                         std::size_t max_rank, Rng& rng);
DecoderParams make_decoder(ModelParams& params, const encoders::ModelConfig& config,
                           Rng& rng);

// Keys/values: for each candidate in rank order, a separator row followed by
// the candidate's hidden rows shifted by that rank's embedding. Queries are
// the spectrum hidden rows; output has one row per query row.
TensorPtr cross_fuse(const TensorPtr& spec_hidden,
                     const std::vector<TensorPtr>& candidate_hidden,
                     const FusionParams& p);

// Mean NLL of `target` (BOS ... EOS) under the causal decoder conditioned on
// `memory` via cross-attention.
TensorPtr teacher_forced_nll(const TensorPtr& memory, const std::vector<int>& target,
                             const DecoderParams& p, std::size_t max_length);

// ---- beam search ----

// Maps a token prefix (starting with BOS) to log-probabilities over the
// vocabulary for the next position.
using StepFn = std::function<std::vector<double>(const std::vector<int>&)>;

struct Beam {
  std::vector<int> tokens;  // BOS ... [EOS]
  double logprob = 0.0;     // exact sum of chosen token log-probabilities
};

// Standard beam search, no length normalization; beams end at EOS or
// max_length. Result sorted by logprob descending, ties by token sequence.
std::vector<Beam> beam_generate(const StepFn& step, int bos, int eos,
                                const BeamConfig& config);

// StepFn running the decoder over the prefix with cross-attention to memory.
StepFn make_decoder_step(const TensorPtr& memory, const DecoderParams& p);

// ---- re-ranking ----

struct RerankResult {
  index::RankedList ranking;    // same id set as the input candidates
  std::string generated_smiles; // canonical form of the first parseable beam
  bool fallback_used = false;   // true when no beam parsed
};

// Re-orders `candidates` by cosine between each library embedding and the
// embedding of the first parseable beam; falls back to the pre-retrieval
// order when no beam parses.
RerankResult rerank(const std::vector<Beam>& beams, const index::RankedList& candidates,
                    const index::RetrievalLibrary& lib,
                    const encoders::MolecularEncoder& mol_enc,
                    const encoders::ModelConfig& config,
                    const smiles::Vocabulary& vocab);

// ---- stage-2 training ----

struct GenConfig {
  std::size_t epochs = 30;
  std::size_t k = 8;  // candidates per query; full-scale 40
  std::uint64_t seed = 1;
  std::size_t max_length = 128;
};

struct GenPair {
  std::vector<int> mol_tokens;  // vocabulary ids, no specials
  spectra::Spectrum spectrum;   // normalized
};

struct GenResult {
  std::vector<double> step_nll;
  std::vector<double> epoch_nll;  // per-epoch means
};

// Trains fusion + decoder with the encoder groups frozen; candidates come
// from stage-1 pre-retrieval against `lib`.
GenResult train_gen(const std::vector<GenPair>& data, const index::RetrievalLibrary& lib,
                    const GenConfig& config, const OptimizerConfig& opt,
                    ModelParams& params, const encoders::MolecularEncoder& mol_enc,
                    const encoders::SpectralEncoder& spec_enc, const FusionParams& fusion,
                    const DecoderParams& decoder,
                    const encoders::ModelConfig& model_config,
                    const smiles::Vocabulary& vocab);

// ---- retrieval output ----

struct RetrievalRecord {
  std::string identifier;
  std::string generated_smiles;
  std::vector<std::pair<std::string, double>> beams;    // smiles text, logprob
  std::vector<std::pair<std::string, double>> ranking;  // canonical smiles, score
  bool fallback_used = false;
};

std::string retrieval_to_jsonl(const std::vector<RetrievalRecord>& records);

}  // namespace glmr::genret
