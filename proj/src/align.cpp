#include "glmr/align.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace glmr::align {

TensorPtr info_nce(const TensorPtr& anchor, const TensorPtr& positive,
                   const std::vector<TensorPtr>& negatives, double tau) {
  if (anchor->rows != 1 || positive->rows != 1)
    throw WidthMismatch("embeddings must be 1 x d");
  if (positive->cols != anchor->cols) throw WidthMismatch("embedding width mismatch");
  for (const auto& n : negatives)
    if (n->cols != anchor->cols || n->rows != 1)
      throw WidthMismatch("negative embedding width mismatch");
  std::vector<TensorPtr> bank{positive};
  bank.insert(bank.end(), negatives.begin(), negatives.end());
  auto logits = ops::scale(
      ops::matmul(anchor, ops::transpose(ops::concat_rows(bank))), 1.0 / tau);
  auto pos_logit = ops::slice_cols(logits, 0, 1);
  return ops::sub(ops::logsumexp_row(logits), pos_logit);
}

TensorPtr loss_mol2ms(const std::vector<TensorPtr>& mol_embs,
                      const std::vector<TensorPtr>& spec_embs,
                      const std::vector<std::vector<TensorPtr>>& spec_negatives,
                      double tau) {
  std::size_t n = mol_embs.size();
  if (spec_embs.size() != n || spec_negatives.size() != n)
    throw AlignError("batch size mismatch");
  std::vector<TensorPtr> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    terms.push_back(info_nce(mol_embs[i], spec_embs[i], spec_negatives[i], tau));
  return ops::scale(ops::sum(ops::concat_rows(terms)), 1.0 / static_cast<double>(n));
}

TensorPtr loss_ms2mol(const std::vector<TensorPtr>& spec_embs,
                      const std::vector<TensorPtr>& mol_embs,
                      const std::vector<std::vector<std::size_t>>& mol_negative_ids,
                      double tau) {
  std::size_t n = spec_embs.size();
  if (mol_embs.size() != n || mol_negative_ids.size() != n)
    throw AlignError("batch size mismatch");
  std::vector<TensorPtr> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<TensorPtr> negs;
    for (std::size_t j : mol_negative_ids[i]) {
      if (j == i) throw AlignError("negative index equals the positive");
      negs.push_back(mol_embs[j]);
    }
    terms.push_back(info_nce(spec_embs[i], mol_embs[i], negs, tau));
  }
  return ops::scale(ops::sum(ops::concat_rows(terms)), 1.0 / static_cast<double>(n));
}

TensorPtr pre_loss(const TensorPtr& l_ms2mol, const TensorPtr& l_mol2ms) {
  return ops::scale(ops::add(l_ms2mol, l_mol2ms), 0.5);
}

AlignResult train_align(const std::vector<TrainPair>& data, const ContrastiveConfig& config,
                        const OptimizerConfig& opt, ModelParams& params,
                        const encoders::MolecularEncoder& mol_enc,
                        const encoders::SpectralEncoder& spec_enc,
                        const encoders::ModelConfig& model_config) {
  if (data.size() < 2) throw BatchTooSmall("need at least 2 pairs");
  if (config.m_mol_negatives >= static_cast<int>(config.batch_size) ||
      config.m_mol_negatives >= static_cast<int>(data.size()))
    throw AlignError("M must be smaller than the batch");

  ParamGroup& gamma = params.group(encoders::kMolGroup);
  bool gamma_was_frozen = gamma.frozen;
  gamma.frozen = true;

  AlignResult result;
  Rng rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    // deterministic Fisher-Yates
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.integer(i)]);
    for (std::size_t start = 0; start + 1 < order.size();
         start += config.batch_size) {
      std::size_t end = std::min(order.size(), start + config.batch_size);
      std::size_t b = end - start;
      if (b < 2) break;  // a trailing single pair has no in-batch negative

      std::vector<TensorPtr> mol_embs(b), spec_embs(b);
      std::vector<std::vector<TensorPtr>> spec_negs(b);
      std::vector<std::vector<std::size_t>> mol_negs(b);
      for (std::size_t i = 0; i < b; ++i) {
        const TrainPair& pair = data[order[start + i]];
        mol_embs[i] =
            encoders::encode_molecule(pair.mol_tokens, mol_enc, model_config).embedding;
        spec_embs[i] =
            encoders::encode_spectrum(pair.spectrum, spec_enc, model_config).embedding;
        // N perturbed spectra, fresh each step
        for (int k = 0; k < config.n_spec_negatives; ++k) {
          spectra::Spectrum neg =
              spectra::perturb_spectrum(pair.spectrum, rng.raw(), config.perturb_strength);
          spec_negs[i].push_back(
              encoders::encode_spectrum(neg, spec_enc, model_config).embedding);
        }
        // M in-batch molecular negatives, sampled without replacement
        std::vector<std::size_t> pool;
        for (std::size_t j = 0; j < b; ++j)
          if (j != i) pool.push_back(j);
        for (int k = 0; k < config.m_mol_negatives && !pool.empty(); ++k) {
          std::size_t pick = rng.integer(pool.size());
          mol_negs[i].push_back(pool[pick]);
          pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
      }
      auto l_m2s = loss_mol2ms(mol_embs, spec_embs, spec_negs, config.tau);
      auto l_s2m = loss_ms2mol(spec_embs, mol_embs, mol_negs, config.tau);
      auto loss = pre_loss(l_s2m, l_m2s);

      params.zero_grad();
      backward(loss);
      adamw_step(params, opt);
      ++step;
      result.curve.push_back({step, l_s2m->val[0], l_m2s->val[0], loss->val[0]});
    }
  }
  gamma.frozen = gamma_was_frozen;
  return result;
}

void write_loss_csv(std::ostream& out, const std::vector<LossRow>& curve) {
  out << "step,loss_ms2mol,loss_mol2ms,loss_pre\n";
  for (const LossRow& r : curve)
    out << r.step << ',' << r.ms2mol << ',' << r.mol2ms << ',' << r.pre << '\n';
}

}  // namespace glmr::align
