#pragma once
// Dense 2-D double tensors with reverse-mode autodiff, plus the AdamW
// optimizer with per-group freezing. Everything is row-major and
// single-threaded; determinism is part of the contract.

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace glmr {

struct TensorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeMismatch : TensorError {
  using TensorError::TensorError;
};
struct NotScalar : TensorError {
  using TensorError::TensorError;
};
struct IndexOutOfRange : TensorError {
  using TensorError::TensorError;
};

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

// A node in the computation graph. `rows x cols`; vectors are 1 x n.
class Tensor {
 public:
  Tensor(std::size_t rows, std::size_t cols, bool requires_grad = false)
      : rows(rows), cols(cols), val(rows * cols, 0.0), requires_grad(requires_grad) {}

  std::size_t rows, cols;
  std::vector<double> val;
  std::vector<double> grad;  // lazily sized in backward
  bool requires_grad;

  std::vector<TensorPtr> parents;
  std::function<void(Tensor&)> backprop;  // pushes this->grad into parents

  std::size_t size() const { return val.size(); }
  double& at(std::size_t r, std::size_t c) { return val[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return val[r * cols + c]; }

  void ensure_grad() {
    if (grad.size() != val.size()) grad.assign(val.size(), 0.0);
  }
};

TensorPtr make_tensor(std::size_t rows, std::size_t cols, bool requires_grad = false);
TensorPtr make_tensor(std::size_t rows, std::size_t cols, const std::vector<double>& data,
                      bool requires_grad = false);

namespace ops {

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);
TensorPtr transpose(const TensorPtr& a);
TensorPtr add(const TensorPtr& a, const TensorPtr& b);        // same shape
TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(const TensorPtr& a, const TensorPtr& b);        // hadamard
TensorPtr add_rowvec(const TensorPtr& a, const TensorPtr& v); // v is 1 x cols
TensorPtr scale(const TensorPtr& a, double c);
TensorPtr gelu(const TensorPtr& a);
TensorPtr sum(const TensorPtr& a);                            // 1 x 1
TensorPtr mean_rows(const TensorPtr& a, std::size_t valid_rows);  // 1 x cols
TensorPtr softmax_rows(const TensorPtr& a);
// Adds `bias` (same shape, usually -inf style mask values) before softmax.
TensorPtr softmax_rows_masked(const TensorPtr& a, const std::vector<double>& mask);
TensorPtr layer_norm_rows(const TensorPtr& a, const TensorPtr& gain, const TensorPtr& bias);
TensorPtr embedding_rows(const TensorPtr& table, const std::vector<int>& ids);
TensorPtr slice_cols(const TensorPtr& a, std::size_t begin, std::size_t count);
TensorPtr concat_cols(const std::vector<TensorPtr>& parts);
TensorPtr concat_rows(const std::vector<TensorPtr>& parts);
TensorPtr slice_rows(const TensorPtr& a, std::size_t begin, std::size_t count);
// Row-wise dot product of two T x d tensors -> T x 1.
TensorPtr rowwise_dot(const TensorPtr& a, const TensorPtr& b);
// -log softmax(logits)[target] averaged over non-pad positions. logits: T x V.
TensorPtr cross_entropy(const TensorPtr& logits, const std::vector<int>& targets,
                        int pad_id);
// log(sum(exp(a))) over a 1 x n tensor -> 1 x 1, shift-stabilized.
TensorPtr logsumexp_row(const TensorPtr& a);
// Scaled dot-product attention for one head. q: Tq x dh, k/v: Tk x dh.
// mask, when non-empty, is Tq*Tk additive (0 or -1e30 style) row-major.
TensorPtr attention(const TensorPtr& q, const TensorPtr& k, const TensorPtr& v,
                    const std::vector<double>& mask = {});

}  // namespace ops

// Reverse-mode sweep from a scalar loss.
void backward(const TensorPtr& loss);

// ---- parameters & optimizer ----

struct Param {
  std::string name;
  TensorPtr value;
  std::vector<double> m, v;  // AdamW moments
};

struct ParamGroup {
  std::string name;
  bool frozen = false;
  std::vector<Param> params;
};

struct ModelParams {
  std::vector<ParamGroup> groups;
  std::int64_t step_count = 0;

  ParamGroup& group(const std::string& name);
  const ParamGroup* find_group(const std::string& name) const;
  TensorPtr add(const std::string& group_name, const std::string& param_name,
                std::size_t rows, std::size_t cols);
  TensorPtr get(const std::string& group_name, const std::string& param_name) const;
  void zero_grad();
  std::size_t total_size() const;
  // FNV-1a over the raw value bytes of one group; order = declaration order.
  std::uint64_t checksum(const std::string& group_name) const;
};

struct OptimizerConfig {
  double learning_rate = 1e-4;
  double weight_decay = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One decoupled-weight-decay Adam step over all non-frozen groups.
void adamw_step(ModelParams& params, const OptimizerConfig& config);

// ---- init helpers ----

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  double uniform(double lo, double hi);
  double normal(double mean, double stddev);
  std::uint64_t integer(std::uint64_t bound);  // [0, bound)
  std::uint64_t raw();

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

void init_uniform(Tensor& t, Rng& rng, double bound);
void init_normal(Tensor& t, Rng& rng, double stddev);

}  // namespace glmr
