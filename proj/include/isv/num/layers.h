// isv/num/layers.h

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

#ifndef ISV_NUM_LAYERS_H_
#define ISV_NUM_LAYERS_H_

#include <cmath>
#include <string>
#include <vector>

#include "isv/num/graph.h"
#include "isv/rng.h"

namespace isv {
namespace num {

// He-style uniform fan-in init for relu/mfm layers, Xavier for layers feeding
// sigmoid/softmax outputs.
enum class Init { kHe, kXavier };

template <typename T>
Tensor<T> init_uniform(std::vector<int64_t> shape, int64_t fan_in, int64_t fan_out, Init kind,
                       Rng& rng) {
  double limit = kind == Init::kHe ? std::sqrt(6.0 / static_cast<double>(fan_in))
                                   : std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor<T> t(std::move(shape));
  for (auto& v : t.data) v = static_cast<T>(rng.uniform(-limit, limit));
  return t;
}

// Weight/bias pair with gradient accumulators, the unit the optimizer and
// checkpoints operate on.
template <typename T>
struct LayerParams {
  ParamTensor<T> weights;
  ParamTensor<T> biases;

  void zero_grad() {
    weights.zero_grad();
    biases.zero_grad();
  }
  std::vector<ParamTensor<T>*> all() { return {&weights, &biases}; }
};

// out = input . W + b with gradients for W, b and the input.
template <typename T>
typename Graph<T>::Ref dense_apply(Graph<T>& g, typename Graph<T>::Ref input,
                                   LayerParams<T>& p) {
  const int64_t in_dim = g.value(input).ndim() == 2 ? g.value(input).dim(1) : -1;
  if (in_dim != p.weights.value.dim(0))
    throw DataError(strcat_msg("dense_apply: input ", shape_str(g.value(input).shape),
                               " does not match weights ", shape_str(p.weights.value.shape)));
  return g.add_rowvec(g.matmul(input, g.param(p.weights)), g.param(p.biases));
}

template <typename T>
typename Graph<T>::Ref mfm_apply(Graph<T>& g, typename Graph<T>::Ref input) {
  return g.mfm(input);
}

template <typename T>
typename Graph<T>::Ref conv2d_apply(Graph<T>& g, typename Graph<T>::Ref input, LayerParams<T>& p,
                                    int stride, int padding) {
  return g.conv2d(input, g.param(p.weights), g.param(p.biases), stride, padding);
}

enum class Activation { kRelu, kSigmoid, kSoftmax };

template <typename T>
typename Graph<T>::Ref activation_apply(Graph<T>& g, typename Graph<T>::Ref input,
                                        Activation kind) {
  switch (kind) {
    case Activation::kRelu: return g.relu(input);
    case Activation::kSigmoid: return g.sigmoid(input);
    case Activation::kSoftmax: return g.softmax_rows(input);
  }
  throw DataError("activation_apply: unknown kind");
}

template <typename T>
class Dense {
 public:
  Dense(const std::string& name, int64_t in, int64_t out, Init kind, Rng& rng) {
    p_.weights = ParamTensor<T>(name + ".w", init_uniform<T>({in, out}, in, out, kind, rng));
    p_.biases = ParamTensor<T>(name + ".b", Tensor<T>::zeros({out}));
  }

  typename Graph<T>::Ref forward(Graph<T>& g, typename Graph<T>::Ref x) {
    return dense_apply(g, x, p_);
  }

  LayerParams<T>& params() { return p_; }
  int64_t in_dim() const { return p_.weights.value.dim(0); }
  int64_t out_dim() const { return p_.weights.value.dim(1); }

 private:
  LayerParams<T> p_;
};

template <typename T>
class Conv2d {
 public:
  Conv2d(const std::string& name, int64_t in_ch, int64_t out_ch, int64_t kh, int64_t kw,
         int stride, int pad, Init kind, Rng& rng)
      : stride_(stride), pad_(pad) {
    const int64_t fan_in = in_ch * kh * kw;
    const int64_t fan_out = out_ch * kh * kw;
    p_.weights =
        ParamTensor<T>(name + ".w", init_uniform<T>({out_ch, in_ch, kh, kw}, fan_in, fan_out,
                                                    kind, rng));
    p_.biases = ParamTensor<T>(name + ".b", Tensor<T>::zeros({out_ch}));
  }

  typename Graph<T>::Ref forward(Graph<T>& g, typename Graph<T>::Ref x) {
    return conv2d_apply(g, x, p_, stride_, pad_);
  }

  LayerParams<T>& params() { return p_; }

 private:
  LayerParams<T> p_;
  int stride_;
  int pad_;
};

}  // namespace num
}  // namespace isv

#endif  // ISV_NUM_LAYERS_H_
