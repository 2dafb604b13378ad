#include "glmr/genret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace glmr::genret {

FusionParams make_fusion(ModelParams& params, const encoders::ModelConfig& config,
                         std::size_t max_rank, Rng& rng) {
  nn::ParamFactory f(params, encoders::kFusionGroup, rng);
  FusionParams p;
  p.attn = nn::make_mha(f, "cross_attn", config.d, config.heads);
  p.rank_embedding = f.normal("rank_embedding", max_rank, config.d);
  p.separator = f.normal("separator", 1, config.d);
  p.max_rank = max_rank;
  return p;
}

DecoderParams make_decoder(ModelParams& params, const encoders::ModelConfig& config,
                           Rng& rng) {
  nn::ParamFactory f(params, encoders::kDecoderGroup, rng);
  DecoderParams p;
  p.token_embedding = f.normal("token_embedding", config.vocab_size, config.d);
  for (std::size_t i = 0; i < config.dec_layers; ++i)
    p.layers.push_back(nn::make_decoder_layer(f, "layer" + std::to_string(i), config.d,
                                              config.heads));
  p.final_norm = nn::make_layer_norm(f, "final_norm", config.d);
  p.out_proj = nn::make_linear(f, "out_proj", config.d, config.vocab_size);
  return p;
}

TensorPtr cross_fuse(const TensorPtr& spec_hidden,
                     const std::vector<TensorPtr>& candidate_hidden,
                     const FusionParams& p) {
  std::size_t d = p.separator->cols;
  if (spec_hidden->cols != d) throw WidthMismatch("query width differs from fusion width");
  if (candidate_hidden.empty()) throw GenretError("no candidates to fuse");
  if (candidate_hidden.size() > p.max_rank)
    throw GenretError("more candidates than rank embeddings");
  std::vector<TensorPtr> parts;
  for (std::size_t i = 0; i < candidate_hidden.size(); ++i) {
    if (candidate_hidden[i]->cols != d)
      throw WidthMismatch("candidate width differs from fusion width");
    TensorPtr rank = ops::slice_rows(p.rank_embedding, i, 1);
    parts.push_back(p.separator);
    parts.push_back(ops::add_rowvec(candidate_hidden[i], rank));
  }
  TensorPtr bank = ops::concat_rows(parts);
  return nn::mha(spec_hidden, bank, p.attn);
}

TensorPtr teacher_forced_nll(const TensorPtr& memory, const std::vector<int>& target,
                             const DecoderParams& p, std::size_t max_length) {
  if (target.size() < 2) throw GenretError("target must be BOS ... EOS");
  if (target.size() > max_length) throw SequenceTooLong("target exceeds max length");
  std::vector<int> input(target.begin(), target.end() - 1);
  std::vector<int> labels(target.begin() + 1, target.end());
  TensorPtr x = ops::embedding_rows(p.token_embedding, input);
  x = ops::add(x, nn::sinusoidal_positions(input.size(), x->cols));
  std::vector<double> mask = nn::causal_mask(input.size());
  for (const nn::DecoderLayerP& layer : p.layers)
    x = nn::decoder_layer(x, memory, layer, mask);
  x = nn::layer_norm(x, p.final_norm);
  TensorPtr logits = nn::linear(x, p.out_proj);
  return ops::cross_entropy(logits, labels, smiles::Vocabulary::kPad);
}

// ---- beam search ----

namespace {

struct BeamState {
  std::vector<int> tokens;
  double logprob = 0.0;
  bool done = false;
};

bool beam_better(const BeamState& a, const BeamState& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return a.tokens < b.tokens;
}

}  // namespace

std::vector<Beam> beam_generate(const StepFn& step, int bos, int eos,
                                const BeamConfig& config) {
  std::vector<BeamState> beams{{{bos}, 0.0, false}};
  for (;;) {
    bool any_live = false;
    for (const BeamState& b : beams)
      if (!b.done && b.tokens.size() < config.max_length) any_live = true;
    if (!any_live) break;

    std::vector<BeamState> pool;
    for (const BeamState& b : beams) {
      if (b.done || b.tokens.size() >= config.max_length) {
        pool.push_back(b);
        continue;
      }
      std::vector<double> logp = step(b.tokens);
      for (std::size_t v = 0; v < logp.size(); ++v) {
        if (!std::isfinite(logp[v])) continue;
        BeamState next = b;
        next.tokens.push_back(static_cast<int>(v));
        next.logprob += logp[v];
        next.done = static_cast<int>(v) == eos;
        pool.push_back(std::move(next));
      }
    }
    std::sort(pool.begin(), pool.end(), beam_better);
    if (pool.size() > config.beam_width) pool.resize(config.beam_width);
    beams = std::move(pool);
    bool all_done = true;
    for (const BeamState& b : beams)
      if (!b.done && b.tokens.size() < config.max_length) all_done = false;
    if (all_done) break;
  }
  std::sort(beams.begin(), beams.end(), beam_better);
  std::vector<Beam> out;
  for (const BeamState& b : beams) out.push_back({b.tokens, b.logprob});
  return out;
}

StepFn make_decoder_step(const TensorPtr& memory, const DecoderParams& p) {
  return [memory, &p](const std::vector<int>& prefix) {
    TensorPtr x = ops::embedding_rows(p.token_embedding, prefix);
    x = ops::add(x, nn::sinusoidal_positions(prefix.size(), x->cols));
    std::vector<double> mask = nn::causal_mask(prefix.size());
    for (const nn::DecoderLayerP& layer : p.layers)
      x = nn::decoder_layer(x, memory, layer, mask);
    x = nn::layer_norm(x, p.final_norm);
    TensorPtr logits = nn::linear(x, p.out_proj);
    std::size_t last = logits->rows - 1;
    std::vector<double> row(logits->cols);
    double mx = -1e300;
    for (std::size_t v = 0; v < logits->cols; ++v) {
      row[v] = logits->at(last, v);
      mx = std::max(mx, row[v]);
    }
    double lse = 0.0;
    for (double z : row) lse += std::exp(z - mx);
    lse = mx + std::log(lse);
    for (double& z : row) z -= lse;
    return row;
  };
}

// ---- re-ranking ----

RerankResult rerank(const std::vector<Beam>& beams, const index::RankedList& candidates,
                    const index::RetrievalLibrary& lib,
                    const encoders::MolecularEncoder& mol_enc,
                    const encoders::ModelConfig& config,
                    const smiles::Vocabulary& vocab) {
  RerankResult out;
  std::vector<std::size_t> ids;
  for (const index::RankedEntry& e : candidates) ids.push_back(e.record_id);

  for (const Beam& b : beams) {
    std::string text = smiles::decode_ids(b.tokens, vocab);
    std::string canonical;
    try {
      canonical = smiles::canonical_smiles(text);
    } catch (const smiles::SmilesError&) {
      continue;
    }
    std::vector<int> tokens;
    try {
      tokens = smiles::encode_string(canonical, vocab);
    } catch (const smiles::SmilesError&) {
      continue;
    }
    encoders::Encoded enc = encoders::encode_molecule(tokens, mol_enc, config);
    std::vector<double> emb = enc.embedding->val;
    out.generated_smiles = canonical;
    out.ranking = index::rank_by_cosine(emb, lib, ids);
    return out;
  }
  out.fallback_used = true;
  out.ranking = candidates;
  return out;
}

// ---- stage-2 training ----

GenResult train_gen(const std::vector<GenPair>& data, const index::RetrievalLibrary& lib,
                    const GenConfig& config, const OptimizerConfig& opt,
                    ModelParams& params, const encoders::MolecularEncoder& mol_enc,
                    const encoders::SpectralEncoder& spec_enc, const FusionParams& fusion,
                    const DecoderParams& decoder,
                    const encoders::ModelConfig& model_config,
                    const smiles::Vocabulary& vocab) {
  GenResult result;
  if (data.empty()) throw GenretError("no training pairs");

  ParamGroup& mol_group = params.group(encoders::kMolGroup);
  ParamGroup& spec_group = params.group(encoders::kSpecGroup);
  bool mol_was_frozen = mol_group.frozen;
  bool spec_was_frozen = spec_group.frozen;
  mol_group.frozen = true;
  spec_group.frozen = true;

  std::vector<std::size_t> all_ids(lib.records.size());
  std::iota(all_ids.begin(), all_ids.end(), std::size_t{0});

  // candidate token ids are fixed per library record
  std::vector<std::vector<int>> lib_tokens;
  for (const spectra::MoleculeRecord& rec : lib.records)
    lib_tokens.push_back(smiles::encode_string(rec.canonical_smiles, vocab));

  Rng rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.integer(i)]);
    double epoch_sum = 0.0;
    for (std::size_t idx : order) {
      const GenPair& pair = data[idx];
      encoders::Encoded spec = encoders::encode_spectrum(pair.spectrum, spec_enc,
                                                         model_config);
      index::RankedList pre =
          index::pre_retrieve(spec.embedding->val, lib, all_ids, config.k);
      std::vector<TensorPtr> cand_hidden;
      for (const index::RankedEntry& e : pre) {
        encoders::Encoded enc =
            encoders::encode_molecule(lib_tokens[e.record_id], mol_enc, model_config);
        cand_hidden.push_back(enc.hidden);
      }
      TensorPtr memory = cross_fuse(spec.hidden, cand_hidden, fusion);
      std::vector<int> target;
      target.push_back(smiles::Vocabulary::kBos);
      target.insert(target.end(), pair.mol_tokens.begin(), pair.mol_tokens.end());
      target.push_back(smiles::Vocabulary::kEos);
      TensorPtr nll = teacher_forced_nll(memory, target, decoder, config.max_length);
      params.zero_grad();
      backward(nll);
      adamw_step(params, opt);
      result.step_nll.push_back(nll->val[0]);
      epoch_sum += nll->val[0];
    }
    result.epoch_nll.push_back(epoch_sum / static_cast<double>(order.size()));
  }

  mol_group.frozen = mol_was_frozen;
  spec_group.frozen = spec_was_frozen;
  return result;
}

std::string retrieval_to_jsonl(const std::vector<RetrievalRecord>& records) {
  std::string out;
  for (const RetrievalRecord& r : records) {
    nlohmann::json j;
    j["identifier"] = r.identifier;
    j["generated_smiles"] = r.generated_smiles;
    j["beams"] = nlohmann::json::array();
    for (const auto& [text, lp] : r.beams)
      j["beams"].push_back({{"smiles", text}, {"logprob", lp}});
    j["ranking"] = nlohmann::json::array();
    for (const auto& [text, score] : r.ranking)
      j["ranking"].push_back({{"canonical_smiles", text}, {"score", score}});
    j["fallback_used"] = r.fallback_used;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace glmr::genret
