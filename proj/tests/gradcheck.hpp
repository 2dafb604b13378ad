#pragma once
// Central finite-difference gradient checking shared by the unit and
// acceptance suites.

#include <cmath>
#include <functional>
#include <vector>

#include "glmr/tensor.hpp"

namespace gradcheck {

// Builds a scalar loss from the leaves; called repeatedly with perturbed
// leaf values, so it must rebuild the graph every time.
using LossFn = std::function<glmr::TensorPtr(const std::vector<glmr::TensorPtr>&)>;

// Max absolute error |analytic - central difference| relative to
// max(1, |fd|), over every element of every leaf.
inline double max_rel_error(const LossFn& f, std::vector<glmr::TensorPtr> leaves,
                            double h = 1e-3) {
  glmr::TensorPtr loss = f(leaves);
  glmr::backward(loss);
  double worst = 0.0;
  for (auto& leaf : leaves) {
    leaf->ensure_grad();
    for (std::size_t i = 0; i < leaf->size(); ++i) {
      double saved = leaf->val[i];
      leaf->val[i] = saved + h;
      double up = f(leaves)->val[0];
      leaf->val[i] = saved - h;
      double down = f(leaves)->val[0];
      leaf->val[i] = saved;
      double fd = (up - down) / (2.0 * h);
      double err = std::abs(leaf->grad[i] - fd) / std::max(1.0, std::abs(fd));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

inline glmr::TensorPtr random_leaf(glmr::Rng& rng, std::size_t r, std::size_t c,
                                   double lo = -1.5, double hi = 1.5) {
  auto t = glmr::make_tensor(r, c, true);
  for (double& v : t->val) v = rng.uniform(lo, hi);
  return t;
}

// Constant (non-differentiated) random tensor; capture one of these in the
// loss lambda so the seeded gradient is not all-ones and the function is
// stable across repeated evaluations.
inline glmr::TensorPtr random_const(glmr::Rng& rng, std::size_t r, std::size_t c) {
  auto t = glmr::make_tensor(r, c);
  for (double& v : t->val) v = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace gradcheck
