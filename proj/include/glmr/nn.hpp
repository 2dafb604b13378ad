#pragma once
// Transformer building blocks shared by the molecular encoder, spectral
// encoder, cross-fusion module and decoder. Pre-norm residual layout.

#include <string>
#include <vector>

#include "glmr/tensor.hpp"

namespace glmr::nn {

// Registers parameters into a named group of ModelParams with a name prefix,
// so checkpoint order is the declaration order.
class ParamFactory {
 public:
  ParamFactory(ModelParams& params, std::string group, Rng& rng)
      : params_(params), group_(std::move(group)), rng_(rng) {}

  TensorPtr uniform(const std::string& name, std::size_t rows, std::size_t cols);
  TensorPtr normal(const std::string& name, std::size_t rows, std::size_t cols,
                   double stddev = 0.02);
  TensorPtr zeros(const std::string& name, std::size_t rows, std::size_t cols);
  TensorPtr ones(const std::string& name, std::size_t rows, std::size_t cols);

 private:
  ModelParams& params_;
  std::string group_;
  Rng& rng_;
};

struct LinearP {
  TensorPtr w;  // in x out
  TensorPtr b;  // 1 x out
};
LinearP make_linear(ParamFactory& f, const std::string& prefix, std::size_t in,
                    std::size_t out);
TensorPtr linear(const TensorPtr& x, const LinearP& p);

struct LayerNormP {
  TensorPtr gain, bias;  // 1 x d
};
LayerNormP make_layer_norm(ParamFactory& f, const std::string& prefix, std::size_t d);
TensorPtr layer_norm(const TensorPtr& x, const LayerNormP& p);

struct MhaP {
  LinearP q, k, v, o;
  std::size_t heads = 1;
};
MhaP make_mha(ParamFactory& f, const std::string& prefix, std::size_t d,
              std::size_t heads);
// x_q: Tq x d, x_kv: Tk x d. mask, when non-empty, is additive Tq*Tk.
TensorPtr mha(const TensorPtr& x_q, const TensorPtr& x_kv, const MhaP& p,
              const std::vector<double>& mask = {});

struct EncoderLayerP {
  LayerNormP ln1, ln2;
  MhaP attn;
  LinearP ff1, ff2;
};
EncoderLayerP make_encoder_layer(ParamFactory& f, const std::string& prefix,
                                 std::size_t d, std::size_t heads);
TensorPtr encoder_layer(const TensorPtr& x, const EncoderLayerP& p,
                        const std::vector<double>& mask = {});

struct DecoderLayerP {
  LayerNormP ln1, ln2, ln3;
  MhaP self_attn, cross_attn;
  LinearP ff1, ff2;
};
DecoderLayerP make_decoder_layer(ParamFactory& f, const std::string& prefix,
                                 std::size_t d, std::size_t heads);
TensorPtr decoder_layer(const TensorPtr& x, const TensorPtr& memory,
                        const DecoderLayerP& p, const std::vector<double>& self_mask);

// Additive masks: 0 where allowed, -1e30 where blocked.
std::vector<double> causal_mask(std::size_t t);
// Block key columns >= valid for every query row.
std::vector<double> key_padding_mask(std::size_t t_q, std::size_t t_k,
                                     std::size_t valid_k);

// Row r gets sin/cos features; returned as a constant tensor T x d.
TensorPtr sinusoidal_positions(std::size_t t, std::size_t d);

}  // namespace glmr::nn
