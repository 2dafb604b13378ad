#include "glmr/encoders.hpp"

namespace glmr::encoders {

MolecularEncoder make_molecular_encoder(ModelParams& params, const ModelConfig& config,
                                        Rng& rng) {
  config.validate();
  if (config.vocab_size == 0) throw EncodersError("vocab_size not set");
  nn::ParamFactory f(params, kMolGroup, rng);
  MolecularEncoder enc;
  enc.token_embedding = f.normal("token_embedding", config.vocab_size, config.d);
  enc.cls = f.normal("cls", 1, config.d);
  for (std::size_t i = 0; i < config.mol_layers; ++i)
    enc.layers.push_back(
        nn::make_encoder_layer(f, "layer" + std::to_string(i), config.d, config.heads));
  enc.final_norm = nn::make_layer_norm(f, "final_norm", config.d);
  return enc;
}

SpectralEncoder make_spectral_encoder(ModelParams& params, const ModelConfig& config,
                                      Rng& rng) {
  config.validate();
  nn::ParamFactory f(params, kSpecGroup, rng);
  SpectralEncoder enc;
  enc.peak_proj = nn::make_linear(f, "peak_proj", 2, config.d);
  for (std::size_t i = 0; i < config.spec_layers; ++i)
    enc.layers.push_back(
        nn::make_encoder_layer(f, "layer" + std::to_string(i), config.d, config.heads));
  enc.final_norm = nn::make_layer_norm(f, "final_norm", config.d);
  return enc;
}

Encoded encode_molecule(const std::vector<int>& token_ids, const MolecularEncoder& enc,
                        const ModelConfig& config, std::size_t pad_to) {
  if (token_ids.empty()) throw EncodersError("empty token sequence");
  std::size_t t_valid = token_ids.size() + 1;  // CLS prepended
  if (t_valid > config.max_mol_tokens)
    throw SequenceTooLong("molecule sequence exceeds max_mol_tokens");
  std::size_t t = std::max(pad_to, t_valid);

  std::vector<int> padded = token_ids;
  padded.resize(t - 1, smiles::Vocabulary::kPad);
  auto tokens = ops::embedding_rows(enc.token_embedding, padded);
  auto x = ops::concat_rows({enc.cls, tokens});
  x = ops::add(x, nn::sinusoidal_positions(t, config.d));

  std::vector<double> mask =
      t > t_valid ? nn::key_padding_mask(t, t, t_valid) : std::vector<double>{};
  for (const auto& layer : enc.layers) x = nn::encoder_layer(x, layer, mask);
  x = nn::layer_norm(x, enc.final_norm);

  Encoded out;
  out.hidden = x;
  out.embedding = ops::slice_rows(x, 0, 1);  // final CLS row
  out.valid_rows = t_valid;
  return out;
}

Encoded encode_spectrum(const spectra::Spectrum& s, const SpectralEncoder& enc,
                        const ModelConfig& config) {
  if (s.peaks.empty()) throw EncodersError("empty spectrum");
  if (s.peaks.size() > config.max_peaks)
    throw TooManyPeaks("spectrum exceeds max_peaks");
  if (!spectra::is_normalized(s)) throw NotNormalized("spectrum is not normalized");

  std::size_t t = s.peaks.size();
  auto input = make_tensor(t, 2);
  for (std::size_t i = 0; i < t; ++i) {
    input->at(i, 0) = s.peaks[i].mz / 1000.0;  // keep m/z near unit scale
    input->at(i, 1) = s.peaks[i].intensity;
  }
  auto x = nn::linear(input, enc.peak_proj);
  for (const auto& layer : enc.layers) x = nn::encoder_layer(x, layer);
  x = nn::layer_norm(x, enc.final_norm);

  Encoded out;
  out.hidden = x;
  out.embedding = ops::mean_rows(x, t);
  out.valid_rows = t;
  return out;
}

}  // namespace glmr::encoders
