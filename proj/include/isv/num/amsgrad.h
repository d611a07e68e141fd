// isv/num/amsgrad.h

// Copyright 2026  isvkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ISV_NUM_AMSGRAD_H_
#define ISV_NUM_AMSGRAD_H_

#include <cmath>
#include <string>
#include <vector>

#include "isv/num/graph.h"

namespace isv {
namespace num {

struct AmsgradConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;  // coupled L2: lambda * theta added to the gradient
};

// Per-parameter moment state.  vhat is elementwise non-decreasing across
// steps; the update divides by sqrt(vhat) rather than sqrt(v).
template <typename T>
struct AmsgradState {
  Tensor<T> m, v, vhat;
};

template <typename T>
class Amsgrad {
 public:
  explicit Amsgrad(AmsgradConfig cfg) : cfg_(cfg) {
    if (cfg_.weight_decay < 0) throw ConfigError("amsgrad: weight decay must be >= 0");
  }

  const AmsgradConfig& config() const { return cfg_; }
  int64_t step_count() const { return t_; }

  void register_params(const std::vector<ParamTensor<T>*>& params) {
    params_ = params;
    states_.clear();
    states_.reserve(params.size());
    for (auto* p : params)
      states_.push_back(AmsgradState<T>{Tensor<T>::zeros(p->value.shape),
                                        Tensor<T>::zeros(p->value.shape),
                                        Tensor<T>::zeros(p->value.shape)});
  }

  // g' = g + lambda * theta
  // m <- b1 m + (1-b1) g' ;  v <- b2 v + (1-b2) g'^2 ;  vhat <- max(vhat, v)
  // theta <- theta - lr * m / (sqrt(vhat) + eps)
  void step() {
    ++t_;
    const T lr = static_cast<T>(cfg_.lr);
    const T b1 = static_cast<T>(cfg_.beta1);
    const T b2 = static_cast<T>(cfg_.beta2);
    const T eps = static_cast<T>(cfg_.eps);
    const T wd = static_cast<T>(cfg_.weight_decay);
    for (size_t pi = 0; pi < params_.size(); ++pi) {
      ParamTensor<T>& p = *params_[pi];
      AmsgradState<T>& s = states_[pi];
      for (int64_t i = 0; i < p.value.numel(); ++i) {
        const T gr = p.grad.ptr()[i];
        if (!std::isfinite(static_cast<double>(gr)))
          throw NumericError(strcat_msg("non-finite gradient in parameter '", p.name,
                                        "' at step ", t_));
        const T g = gr + wd * p.value.ptr()[i];
        s.m.ptr()[i] = b1 * s.m.ptr()[i] + (T(1) - b1) * g;
        s.v.ptr()[i] = b2 * s.v.ptr()[i] + (T(1) - b2) * g * g;
        if (s.v.ptr()[i] > s.vhat.ptr()[i]) s.vhat.ptr()[i] = s.v.ptr()[i];
        p.value.ptr()[i] -= lr * s.m.ptr()[i] / (std::sqrt(s.vhat.ptr()[i]) + eps);
      }
    }
  }

  std::vector<AmsgradState<T>>& states() { return states_; }
  const std::vector<AmsgradState<T>>& states() const { return states_; }
  void set_step_count(int64_t t) { t_ = t; }

 private:
  AmsgradConfig cfg_;
  std::vector<ParamTensor<T>*> params_;
  std::vector<AmsgradState<T>> states_;
  int64_t t_ = 0;
};

}  // namespace num
}  // namespace isv

#endif  // ISV_NUM_AMSGRAD_H_
