#include "glmr/nn.hpp"

#include <cmath>

namespace glmr::nn {

TensorPtr ParamFactory::uniform(const std::string& name, std::size_t rows,
                                std::size_t cols) {
  auto t = params_.add(group_, name, rows, cols);
  init_uniform(*t, rng_, 1.0 / std::sqrt(static_cast<double>(cols)));
  return t;
}

TensorPtr ParamFactory::normal(const std::string& name, std::size_t rows,
                               std::size_t cols, double stddev) {
  auto t = params_.add(group_, name, rows, cols);
  init_normal(*t, rng_, stddev);
  return t;
}

TensorPtr ParamFactory::zeros(const std::string& name, std::size_t rows,
                              std::size_t cols) {
  return params_.add(group_, name, rows, cols);
}

TensorPtr ParamFactory::ones(const std::string& name, std::size_t rows,
                             std::size_t cols) {
  auto t = params_.add(group_, name, rows, cols);
  for (double& v : t->val) v = 1.0;
  return t;
}

LinearP make_linear(ParamFactory& f, const std::string& prefix, std::size_t in,
                    std::size_t out) {
  return {f.uniform(prefix + ".w", in, out), f.zeros(prefix + ".b", 1, out)};
}

TensorPtr linear(const TensorPtr& x, const LinearP& p) {
  return ops::add_rowvec(ops::matmul(x, p.w), p.b);
}

LayerNormP make_layer_norm(ParamFactory& f, const std::string& prefix, std::size_t d) {
  return {f.ones(prefix + ".gain", 1, d), f.zeros(prefix + ".bias", 1, d)};
}

TensorPtr layer_norm(const TensorPtr& x, const LayerNormP& p) {
  return ops::layer_norm_rows(x, p.gain, p.bias);
}

MhaP make_mha(ParamFactory& f, const std::string& prefix, std::size_t d,
              std::size_t heads) {
  MhaP p;
  p.q = make_linear(f, prefix + ".q", d, d);
  p.k = make_linear(f, prefix + ".k", d, d);
  p.v = make_linear(f, prefix + ".v", d, d);
  p.o = make_linear(f, prefix + ".o", d, d);
  p.heads = heads;
  return p;
}

TensorPtr mha(const TensorPtr& x_q, const TensorPtr& x_kv, const MhaP& p,
              const std::vector<double>& mask) {
  auto q = linear(x_q, p.q);
  auto k = linear(x_kv, p.k);
  auto v = linear(x_kv, p.v);
  std::size_t dh = q->cols / p.heads;
  std::vector<TensorPtr> heads_out;
  heads_out.reserve(p.heads);
  for (std::size_t h = 0; h < p.heads; ++h) {
    auto qh = ops::slice_cols(q, h * dh, dh);
    auto kh = ops::slice_cols(k, h * dh, dh);
    auto vh = ops::slice_cols(v, h * dh, dh);
    heads_out.push_back(ops::attention(qh, kh, vh, mask));
  }
  return linear(ops::concat_cols(heads_out), p.o);
}

EncoderLayerP make_encoder_layer(ParamFactory& f, const std::string& prefix,
                                 std::size_t d, std::size_t heads) {
  EncoderLayerP p;
  p.ln1 = make_layer_norm(f, prefix + ".ln1", d);
  p.attn = make_mha(f, prefix + ".attn", d, heads);
  p.ln2 = make_layer_norm(f, prefix + ".ln2", d);
  p.ff1 = make_linear(f, prefix + ".ff1", d, 4 * d);
  p.ff2 = make_linear(f, prefix + ".ff2", 4 * d, d);
  return p;
}

TensorPtr encoder_layer(const TensorPtr& x, const EncoderLayerP& p,
                        const std::vector<double>& mask) {
  auto n1 = layer_norm(x, p.ln1);
  auto h = ops::add(x, mha(n1, n1, p.attn, mask));
  auto ff = linear(ops::gelu(linear(layer_norm(h, p.ln2), p.ff1)), p.ff2);
  return ops::add(h, ff);
}

DecoderLayerP make_decoder_layer(ParamFactory& f, const std::string& prefix,
                                 std::size_t d, std::size_t heads) {
  DecoderLayerP p;
  p.ln1 = make_layer_norm(f, prefix + ".ln1", d);
  p.self_attn = make_mha(f, prefix + ".self", d, heads);
  p.ln2 = make_layer_norm(f, prefix + ".ln2", d);
  p.cross_attn = make_mha(f, prefix + ".cross", d, heads);
  p.ln3 = make_layer_norm(f, prefix + ".ln3", d);
  p.ff1 = make_linear(f, prefix + ".ff1", d, 4 * d);
  p.ff2 = make_linear(f, prefix + ".ff2", 4 * d, d);
  return p;
}

TensorPtr decoder_layer(const TensorPtr& x, const TensorPtr& memory,
                        const DecoderLayerP& p, const std::vector<double>& self_mask) {
  auto n1 = layer_norm(x, p.ln1);
  auto h = ops::add(x, mha(n1, n1, p.self_attn, self_mask));
  auto h2 = ops::add(h, mha(layer_norm(h, p.ln2), memory, p.cross_attn));
  auto ff = linear(ops::gelu(linear(layer_norm(h2, p.ln3), p.ff1)), p.ff2);
  return ops::add(h2, ff);
}

std::vector<double> causal_mask(std::size_t t) {
  std::vector<double> m(t * t, 0.0);
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t c = r + 1; c < t; ++c) m[r * t + c] = -1e30;
  return m;
}

std::vector<double> key_padding_mask(std::size_t t_q, std::size_t t_k,
                                     std::size_t valid_k) {
  std::vector<double> m(t_q * t_k, 0.0);
  for (std::size_t r = 0; r < t_q; ++r)
    for (std::size_t c = valid_k; c < t_k; ++c) m[r * t_k + c] = -1e30;
  return m;
}

TensorPtr sinusoidal_positions(std::size_t t, std::size_t d) {
  auto pe = make_tensor(t, d);
  for (std::size_t pos = 0; pos < t; ++pos) {
    for (std::size_t i = 0; i < d; i += 2) {
      double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d));
      pe->at(pos, i) = std::sin(static_cast<double>(pos) * freq);
      if (i + 1 < d) pe->at(pos, i + 1) = std::cos(static_cast<double>(pos) * freq);
    }
  }
  return pe;
}

}  // namespace glmr::nn
