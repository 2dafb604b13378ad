#include "glmr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "glmr/kernels.hpp"

namespace glmr {

TensorPtr make_tensor(std::size_t rows, std::size_t cols, bool requires_grad) {
  return std::make_shared<Tensor>(rows, cols, requires_grad);
}

TensorPtr make_tensor(std::size_t rows, std::size_t cols, const std::vector<double>& data,
                      bool requires_grad) {
  if (data.size() != rows * cols) throw ShapeMismatch("make_tensor: data size mismatch");
  auto t = std::make_shared<Tensor>(rows, cols, requires_grad);
  t->val = data;
  return t;
}

namespace ops {
namespace {

TensorPtr node(std::size_t rows, std::size_t cols, std::vector<TensorPtr> parents) {
  auto t = std::make_shared<Tensor>(rows, cols);
  for (const auto& p : parents) t->requires_grad = t->requires_grad || p->requires_grad;
  t->parents = std::move(parents);
  return t;
}

}  // namespace

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b) {
  if (a->cols != b->rows) throw ShapeMismatch("matmul: inner extents differ");
  auto out = node(a->rows, b->cols, {a, b});
  kernels::matmul_acc(a->val.data(), b->val.data(), out->val.data(), a->rows,
                      a->cols, b->cols);
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    Tensor& B = *self.parents[1];
    if (A.requires_grad) {
      A.ensure_grad();
      // dA(i,p) = dot(dC row i, B row p)
      for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t p = 0; p < A.cols; ++p)
          A.grad[i * A.cols + p] += kernels::dot(
              self.grad.data() + i * self.cols, B.val.data() + p * B.cols, B.cols);
    }
    if (B.requires_grad) {
      B.ensure_grad();
      // dB += A^T * dC
      for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t p = 0; p < A.cols; ++p)
          kernels::axpy(A.val[i * A.cols + p], self.grad.data() + i * self.cols,
                        B.grad.data() + p * B.cols, B.cols);
    }
  };
  return out;
}

TensorPtr transpose(const TensorPtr& a) {
  auto out = node(a->cols, a->rows, {a});
  for (std::size_t r = 0; r < a->rows; ++r)
    for (std::size_t c = 0; c < a->cols; ++c) out->at(c, r) = a->at(r, c);
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    if (!A.requires_grad) return;
    A.ensure_grad();
    for (std::size_t r = 0; r < self.rows; ++r)
      for (std::size_t c = 0; c < self.cols; ++c)
        A.grad[c * A.cols + r] += self.grad[r * self.cols + c];
  };
  return out;
}

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
  if (a->rows != b->rows || a->cols != b->cols) throw ShapeMismatch("add: shape mismatch");
  auto out = node(a->rows, a->cols, {a, b});
  kernels::add(a->val.data(), b->val.data(), out->val.data(), out->size());
  out->backprop = [](Tensor& self) {
    for (auto& p : self.parents) {
      if (!p->requires_grad) continue;
      p->ensure_grad();
      kernels::axpy(1.0, self.grad.data(), p->grad.data(), self.grad.size());
    }
  };
  return out;
}

TensorPtr sub(const TensorPtr& a, const TensorPtr& b) {
  if (a->rows != b->rows || a->cols != b->cols) throw ShapeMismatch("sub: shape mismatch");
  auto out = node(a->rows, a->cols, {a, b});
  for (std::size_t i = 0; i < out->size(); ++i) out->val[i] = a->val[i] - b->val[i];
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    Tensor& B = *self.parents[1];
    if (A.requires_grad) {
      A.ensure_grad();
      kernels::axpy(1.0, self.grad.data(), A.grad.data(), self.grad.size());
    }
    if (B.requires_grad) {
      B.ensure_grad();
      kernels::axpy(-1.0, self.grad.data(), B.grad.data(), self.grad.size());
    }
  };
  return out;
}

TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
  if (a->rows != b->rows || a->cols != b->cols) throw ShapeMismatch("mul: shape mismatch");
  auto out = node(a->rows, a->cols, {a, b});
  kernels::mul(a->val.data(), b->val.data(), out->val.data(), out->size());
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    Tensor& B = *self.parents[1];
    if (A.requires_grad) {
      A.ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i) A.grad[i] += self.grad[i] * B.val[i];
    }
    if (B.requires_grad) {
      B.ensure_grad();
      for (std::size_t i = 0; i < self.size(); ++i) B.grad[i] += self.grad[i] * A.val[i];
    }
  };
  return out;
}

TensorPtr add_rowvec(const TensorPtr& a, const TensorPtr& v) {
  if (v->rows != 1 || v->cols != a->cols) throw ShapeMismatch("add_rowvec: bad vector");
  auto out = node(a->rows, a->cols, {a, v});
  for (std::size_t r = 0; r < a->rows; ++r)
    kernels::add(a->val.data() + r * a->cols, v->val.data(),
                 out->val.data() + r * out->cols, a->cols);
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    Tensor& V = *self.parents[1];
    if (A.requires_grad) {
      A.ensure_grad();
      kernels::axpy(1.0, self.grad.data(), A.grad.data(), self.grad.size());
    }
    if (V.requires_grad) {
      V.ensure_grad();
      for (std::size_t r = 0; r < self.rows; ++r)
        kernels::axpy(1.0, self.grad.data() + r * self.cols, V.grad.data(), self.cols);
    }
  };
  return out;
}

TensorPtr scale(const TensorPtr& a, double c) {
  auto out = node(a->rows, a->cols, {a});
  out->val = a->val;
  kernels::scale(c, out->val.data(), out->size());
  out->backprop = [c](Tensor& self) {
    Tensor& A = *self.parents[0];
    if (!A.requires_grad) return;
    A.ensure_grad();
    kernels::axpy(c, self.grad.data(), A.grad.data(), self.grad.size());
  };
  return out;
}

TensorPtr gelu(const TensorPtr& a) {
  auto out = node(a->rows, a->cols, {a});
  constexpr double kInvSqrt2 = 0.7071067811865476;
  for (std::size_t i = 0; i < a->size(); ++i) {
    double x = a->val[i];
    out->val[i] = 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
  }
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    if (!A.requires_grad) return;
    A.ensure_grad();
    constexpr double kInvSqrt2 = 0.7071067811865476;
    constexpr double kInvSqrt2Pi = 0.3989422804014327;
    for (std::size_t i = 0; i < self.size(); ++i) {
      double x = A.val[i];
      double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
      double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      A.grad[i] += self.grad[i] * (cdf + x * pdf);
    }
  };
  return out;
}

TensorPtr sum(const TensorPtr& a) {
  auto out = node(1, 1, {a});
  double acc = 0.0;
  for (double v : a->val) acc += v;
  out->val[0] = acc;
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    if (!A.requires_grad) return;
    A.ensure_grad();
    for (double& g : A.grad) g += self.grad[0];
  };
  return out;
}

TensorPtr mean_rows(const TensorPtr& a, std::size_t valid_rows) {
  if (valid_rows == 0 || valid_rows > a->rows)
    throw ShapeMismatch("mean_rows: bad valid row count");
  auto out = node(1, a->cols, {a});
  for (std::size_t r = 0; r < valid_rows; ++r)
    kernels::axpy(1.0, a->val.data() + r * a->cols, out->val.data(), a->cols);
  kernels::scale(1.0 / static_cast<double>(valid_rows), out->val.data(), a->cols);
  out->backprop = [valid_rows](Tensor& self) {
    Tensor& A = *self.parents[0];
    if (!A.requires_grad) return;
    A.ensure_grad();
    double inv = 1.0 / static_cast<double>(valid_rows);
    for (std::size_t r = 0; r < valid_rows; ++r)
      kernels::axpy(inv, self.grad.data(), A.grad.data() + r * A.cols, A.cols);
  };
  return out;
}

namespace {

TensorPtr softmax_impl(const TensorPtr& a, const std::vector<double>* mask) {
  auto out = node(a->rows, a->cols, {a});
  for (std::size_t r = 0; r < a->rows; ++r) {
    const double* x = a->val.data() + r * a->cols;
    double* y = out->val.data() + r * out->cols;
    double mx = -1e300;
    for (std::size_t c = 0; c < a->cols; ++c) {
      double v = x[c] + (mask ? (*mask)[r * a->cols + c] : 0.0);
      mx = std::max(mx, v);
    }
    double z = 0.0;
    for (std::size_t c = 0; c < a->cols; ++c) {
      double v = x[c] + (mask ? (*mask)[r * a->cols + c] : 0.0);
      y[c] = std::exp(v - mx);
      z += y[c];
    }
    for (std::size_t c = 0; c < a->cols; ++c) y[c] /= z;
  }
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    if (!A.requires_grad) return;
    A.ensure_grad();
    for (std::size_t r = 0; r < self.rows; ++r) {
      const double* y = self.val.data() + r * self.cols;
      const double* dy = self.grad.data() + r * self.cols;
      double dotv = kernels::dot(y, dy, self.cols);
      double* dx = A.grad.data() + r * A.cols;
      for (std::size_t c = 0; c < self.cols; ++c) dx[c] += y[c] * (dy[c] - dotv);
    }
  };
  return out;
}

}  // namespace

TensorPtr softmax_rows(const TensorPtr& a) { return softmax_impl(a, nullptr); }

TensorPtr softmax_rows_masked(const TensorPtr& a, const std::vector<double>& mask) {
  if (mask.size() != a->size()) throw ShapeMismatch("softmax mask size mismatch");
  return softmax_impl(a, &mask);
}

TensorPtr layer_norm_rows(const TensorPtr& a, const TensorPtr& gain, const TensorPtr& bias) {
  if (gain->size() != a->cols || bias->size() != a->cols)
    throw ShapeMismatch("layer_norm: affine width mismatch");
  constexpr double kEps = 1e-5;
  auto out = node(a->rows, a->cols, {a, gain, bias});
  auto xhat = std::make_shared<std::vector<double>>(a->size());
  auto inv_std = std::make_shared<std::vector<double>>(a->rows);
  for (std::size_t r = 0; r < a->rows; ++r) {
    const double* x = a->val.data() + r * a->cols;
    double mu = 0.0;
    for (std::size_t c = 0; c < a->cols; ++c) mu += x[c];
    mu /= static_cast<double>(a->cols);
    double var = 0.0;
    for (std::size_t c = 0; c < a->cols; ++c) var += (x[c] - mu) * (x[c] - mu);
    var /= static_cast<double>(a->cols);
    double is = 1.0 / std::sqrt(var + kEps);
    (*inv_std)[r] = is;
    for (std::size_t c = 0; c < a->cols; ++c) {
      double xh = (x[c] - mu) * is;
      (*xhat)[r * a->cols + c] = xh;
      out->at(r, c) = gain->val[c] * xh + bias->val[c];
    }
  }
  out->backprop = [xhat, inv_std](Tensor& self) {
    Tensor& A = *self.parents[0];
    Tensor& G = *self.parents[1];
    Tensor& B = *self.parents[2];
    std::size_t n = self.cols;
    if (G.requires_grad) G.ensure_grad();
    if (B.requires_grad) B.ensure_grad();
    if (A.requires_grad) A.ensure_grad();
    for (std::size_t r = 0; r < self.rows; ++r) {
      const double* dy = self.grad.data() + r * n;
      const double* xh = xhat->data() + r * n;
      if (G.requires_grad)
        for (std::size_t c = 0; c < n; ++c) G.grad[c] += dy[c] * xh[c];
      if (B.requires_grad)
        for (std::size_t c = 0; c < n; ++c) B.grad[c] += dy[c];
      if (A.requires_grad) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
          double dxh = dy[c] * G.val[c];
          m1 += dxh;
          m2 += dxh * xh[c];
        }
        m1 /= static_cast<double>(n);
        m2 /= static_cast<double>(n);
        double is = (*inv_std)[r];
        for (std::size_t c = 0; c < n; ++c) {
          double dxh = dy[c] * G.val[c];
          A.grad[r * n + c] += is * (dxh - m1 - xh[c] * m2);
        }
      }
    }
  };
  return out;
}

TensorPtr embedding_rows(const TensorPtr& table, const std::vector<int>& ids) {
  for (int id : ids)
    if (id < 0 || static_cast<std::size_t>(id) >= table->rows)
      throw IndexOutOfRange("embedding_rows: id out of range");
  auto out = node(ids.size(), table->cols, {table});
  for (std::size_t r = 0; r < ids.size(); ++r)
    std::memcpy(out->val.data() + r * out->cols,
                table->val.data() + static_cast<std::size_t>(ids[r]) * table->cols,
                sizeof(double) * table->cols);
  out->backprop = [ids](Tensor& self) {
    Tensor& T = *self.parents[0];
    if (!T.requires_grad) return;
    T.ensure_grad();
    for (std::size_t r = 0; r < ids.size(); ++r)
      kernels::axpy(1.0, self.grad.data() + r * self.cols,
                    T.grad.data() + static_cast<std::size_t>(ids[r]) * T.cols, T.cols);
  };
  return out;
}

TensorPtr slice_cols(const TensorPtr& a, std::size_t begin, std::size_t count) {
  if (begin + count > a->cols) throw ShapeMismatch("slice_cols: range out of bounds");
  auto out = node(a->rows, count, {a});
  for (std::size_t r = 0; r < a->rows; ++r)
    std::memcpy(out->val.data() + r * count, a->val.data() + r * a->cols + begin,
                sizeof(double) * count);
  out->backprop = [begin, count](Tensor& self) {
    Tensor& A = *self.parents[0];
    if (!A.requires_grad) return;
    A.ensure_grad();
    for (std::size_t r = 0; r < self.rows; ++r)
      kernels::axpy(1.0, self.grad.data() + r * count,
                    A.grad.data() + r * A.cols + begin, count);
  };
  return out;
}

TensorPtr slice_rows(const TensorPtr& a, std::size_t begin, std::size_t count) {
  if (begin + count > a->rows) throw ShapeMismatch("slice_rows: range out of bounds");
  auto out = node(count, a->cols, {a});
  std::memcpy(out->val.data(), a->val.data() + begin * a->cols,
              sizeof(double) * count * a->cols);
  out->backprop = [begin](Tensor& self) {
    Tensor& A = *self.parents[0];
    if (!A.requires_grad) return;
    A.ensure_grad();
    kernels::axpy(1.0, self.grad.data(), A.grad.data() + begin * A.cols, self.size());
  };
  return out;
}

TensorPtr concat_cols(const std::vector<TensorPtr>& parts) {
  if (parts.empty()) throw ShapeMismatch("concat_cols: no parts");
  std::size_t rows = parts[0]->rows, cols = 0;
  for (const auto& p : parts) {
    if (p->rows != rows) throw ShapeMismatch("concat_cols: row mismatch");
    cols += p->cols;
  }
  auto out = node(rows, cols, parts);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r)
      std::memcpy(out->val.data() + r * cols + off, p->val.data() + r * p->cols,
                  sizeof(double) * p->cols);
    off += p->cols;
  }
  out->backprop = [](Tensor& self) {
    std::size_t off = 0;
    for (auto& p : self.parents) {
      if (p->requires_grad) {
        p->ensure_grad();
        for (std::size_t r = 0; r < self.rows; ++r)
          kernels::axpy(1.0, self.grad.data() + r * self.cols + off,
                        p->grad.data() + r * p->cols, p->cols);
      }
      off += p->cols;
    }
  };
  return out;
}

TensorPtr concat_rows(const std::vector<TensorPtr>& parts) {
  if (parts.empty()) throw ShapeMismatch("concat_rows: no parts");
  std::size_t cols = parts[0]->cols, rows = 0;
  for (const auto& p : parts) {
    if (p->cols != cols) throw ShapeMismatch("concat_rows: col mismatch");
    rows += p->rows;
  }
  auto out = node(rows, cols, parts);
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::memcpy(out->val.data() + off * cols, p->val.data(), sizeof(double) * p->size());
    off += p->rows;
  }
  out->backprop = [](Tensor& self) {
    std::size_t off = 0;
    for (auto& p : self.parents) {
      if (p->requires_grad) {
        p->ensure_grad();
        kernels::axpy(1.0, self.grad.data() + off * self.cols, p->grad.data(), p->size());
      }
      off += p->rows;
    }
  };
  return out;
}

TensorPtr rowwise_dot(const TensorPtr& a, const TensorPtr& b) {
  if (a->rows != b->rows || a->cols != b->cols)
    throw ShapeMismatch("rowwise_dot: shape mismatch");
  auto out = node(a->rows, 1, {a, b});
  for (std::size_t r = 0; r < a->rows; ++r)
    out->val[r] = kernels::dot(a->val.data() + r * a->cols, b->val.data() + r * b->cols,
                               a->cols);
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    Tensor& B = *self.parents[1];
    for (std::size_t r = 0; r < self.rows; ++r) {
      double g = self.grad[r];
      if (A.requires_grad) {
        A.ensure_grad();
        kernels::axpy(g, B.val.data() + r * B.cols, A.grad.data() + r * A.cols, A.cols);
      }
      if (B.requires_grad) {
        B.ensure_grad();
        kernels::axpy(g, A.val.data() + r * A.cols, B.grad.data() + r * B.cols, B.cols);
      }
    }
  };
  return out;
}

TensorPtr cross_entropy(const TensorPtr& logits, const std::vector<int>& targets,
                        int pad_id) {
  if (targets.size() != logits->rows) throw ShapeMismatch("cross_entropy: target count");
  for (int t : targets)
    if (t != pad_id && (t < 0 || static_cast<std::size_t>(t) >= logits->cols))
      throw IndexOutOfRange("cross_entropy: target id out of range");
  auto probs = std::make_shared<std::vector<double>>(logits->size());
  std::size_t n_valid = 0;
  double loss = 0.0;
  for (std::size_t r = 0; r < logits->rows; ++r) {
    const double* x = logits->val.data() + r * logits->cols;
    double* p = probs->data() + r * logits->cols;
    double mx = *std::max_element(x, x + logits->cols);
    double z = 0.0;
    for (std::size_t c = 0; c < logits->cols; ++c) {
      p[c] = std::exp(x[c] - mx);
      z += p[c];
    }
    for (std::size_t c = 0; c < logits->cols; ++c) p[c] /= z;
    if (targets[r] != pad_id) {
      loss -= std::log(p[targets[r]]);
      ++n_valid;
    }
  }
  if (n_valid == 0) throw ShapeMismatch("cross_entropy: all positions are pad");
  auto out = node(1, 1, {logits});
  out->val[0] = loss / static_cast<double>(n_valid);
  out->backprop = [probs, targets, pad_id, n_valid](Tensor& self) {
    Tensor& L = *self.parents[0];
    if (!L.requires_grad) return;
    L.ensure_grad();
    double g = self.grad[0] / static_cast<double>(n_valid);
    for (std::size_t r = 0; r < L.rows; ++r) {
      if (targets[r] == pad_id) continue;
      const double* p = probs->data() + r * L.cols;
      double* dx = L.grad.data() + r * L.cols;
      for (std::size_t c = 0; c < L.cols; ++c) dx[c] += g * p[c];
      dx[targets[r]] -= g;
    }
  };
  return out;
}

TensorPtr logsumexp_row(const TensorPtr& a) {
  if (a->rows != 1) throw ShapeMismatch("logsumexp_row: expects 1 x n");
  auto out = node(1, 1, {a});
  double mx = *std::max_element(a->val.begin(), a->val.end());
  double z = 0.0;
  for (double v : a->val) z += std::exp(v - mx);
  out->val[0] = mx + std::log(z);
  out->backprop = [](Tensor& self) {
    Tensor& A = *self.parents[0];
    if (!A.requires_grad) return;
    A.ensure_grad();
    double mx = *std::max_element(A.val.begin(), A.val.end());
    double z = 0.0;
    for (double v : A.val) z += std::exp(v - mx);
    for (std::size_t i = 0; i < A.size(); ++i)
      A.grad[i] += self.grad[0] * std::exp(A.val[i] - mx) / z;
  };
  return out;
}

TensorPtr attention(const TensorPtr& q, const TensorPtr& k, const TensorPtr& v,
                    const std::vector<double>& mask) {
  if (q->cols != k->cols || k->rows != v->rows)
    throw ShapeMismatch("attention: shape mismatch");
  auto scores = scale(matmul(q, transpose(k)), 1.0 / std::sqrt(double(q->cols)));
  auto weights = mask.empty() ? softmax_rows(scores) : softmax_rows_masked(scores, mask);
  return matmul(weights, v);
}

}  // namespace ops

void backward(const TensorPtr& loss) {
  if (loss->size() != 1) throw NotScalar("backward: loss must be a 1-element tensor");
  // Reverse topological order via iterative post-order DFS.
  std::vector<Tensor*> order;
  std::unordered_set<Tensor*> visited;
  std::vector<std::pair<Tensor*, std::size_t>> stack{{loss.get(), 0}};
  visited.insert(loss.get());
  while (!stack.empty()) {
    auto& [t, idx] = stack.back();
    if (idx < t->parents.size()) {
      Tensor* p = t->parents[idx++].get();
      if (visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(t);
      stack.pop_back();
    }
  }
  loss->ensure_grad();
  loss->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Tensor* t = *it;
    if (t->backprop && t->grad.size() == t->val.size()) t->backprop(*t);
  }
}

ParamGroup& ModelParams::group(const std::string& name) {
  for (auto& g : groups)
    if (g.name == name) return g;
  groups.push_back(ParamGroup{name, false, {}});
  return groups.back();
}

const ParamGroup* ModelParams::find_group(const std::string& name) const {
  for (const auto& g : groups)
    if (g.name == name) return &g;
  return nullptr;
}

TensorPtr ModelParams::add(const std::string& group_name, const std::string& param_name,
                           std::size_t rows, std::size_t cols) {
  auto t = make_tensor(rows, cols, true);
  group(group_name).params.push_back(Param{param_name, t, {}, {}});
  return t;
}

TensorPtr ModelParams::get(const std::string& group_name,
                           const std::string& param_name) const {
  const ParamGroup* g = find_group(group_name);
  if (!g) throw TensorError("unknown parameter group: " + group_name);
  for (const auto& p : g->params)
    if (p.name == param_name) return p.value;
  throw TensorError("unknown parameter: " + group_name + "/" + param_name);
}

void ModelParams::zero_grad() {
  for (auto& g : groups)
    for (auto& p : g.params) p.value->grad.assign(p.value->size(), 0.0);
}

std::size_t ModelParams::total_size() const {
  std::size_t n = 0;
  for (const auto& g : groups)
    for (const auto& p : g.params) n += p.value->size();
  return n;
}

std::uint64_t ModelParams::checksum(const std::string& group_name) const {
  const ParamGroup* g = find_group(group_name);
  if (!g) throw TensorError("unknown parameter group: " + group_name);
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& p : g->params) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p.value->val.data());
    std::size_t n = p.value->size() * sizeof(double);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  }
  return h;
}

void adamw_step(ModelParams& params, const OptimizerConfig& config) {
  params.step_count += 1;
  double t = static_cast<double>(params.step_count);
  double bc1 = 1.0 - std::pow(config.beta1, t);
  double bc2 = 1.0 - std::pow(config.beta2, t);
  for (auto& g : params.groups) {
    if (g.frozen) continue;
    for (auto& p : g.params) {
      Tensor& w = *p.value;
      if (w.grad.size() != w.val.size()) continue;  // no gradient this step
      if (p.m.size() != w.val.size()) {
        p.m.assign(w.val.size(), 0.0);
        p.v.assign(w.val.size(), 0.0);
      }
      for (std::size_t i = 0; i < w.val.size(); ++i) {
        double grad = w.grad[i];
        p.m[i] = config.beta1 * p.m[i] + (1.0 - config.beta1) * grad;
        p.v[i] = config.beta2 * p.v[i] + (1.0 - config.beta2) * grad * grad;
        double mhat = p.m[i] / bc1;
        double vhat = p.v[i] / bc2;
        w.val[i] -= config.learning_rate *
                    (mhat / (std::sqrt(vhat) + config.epsilon) +
                     config.weight_decay * w.val[i]);
      }
    }
  }
}

// splitmix64; deterministic across platforms, which std::mt19937 + distributions
// are not.
std::uint64_t Rng::raw() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
  double u = static_cast<double>(raw() >> 11) * 0x1.0p-53;  // [0,1)
  return lo + u * (hi - lo);
}

double Rng::normal(double mean, double stddev) {
  if (have_spare_) {
    have_spare_ = false;
    return mean + stddev * spare_;
  }
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = uniform(0.0, 1.0);
  double u2 = uniform(0.0, 1.0);
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 6.283185307179586 * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return mean + stddev * r * std::cos(theta);
}

std::uint64_t Rng::integer(std::uint64_t bound) { return bound ? raw() % bound : 0; }

void init_uniform(Tensor& t, Rng& rng, double bound) {
  for (double& v : t.val) v = rng.uniform(-bound, bound);
}

void init_normal(Tensor& t, Rng& rng, double stddev) {
  for (double& v : t.val) v = rng.normal(0.0, stddev);
}

}  // namespace glmr
