// tests/gradsuite.h

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

// Central-difference gradient checks for every layer type, both composite
// losses and both full models.  Shared between the unit tests (few seeds) and
// the acceptance suite (>= 100 random configurations per case).

#ifndef ISVKIT_TESTS_GRADSUITE_H_
#define ISVKIT_TESTS_GRADSUITE_H_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "isv/loss/losses.h"
#include "isv/model/backend.h"
#include "isv/model/e2e.h"
#include "isv/model/encoder.h"
#include "isv/num/gradcheck.h"
#include "isv/rng.h"

namespace gradsuite {

using isv::Rng;
using isv::loss::E2eLossWeights;
using isv::num::Graph;
using isv::num::Tensor;

inline Tensor<double> randn(std::vector<int64_t> shape, Rng& rng, double scale = 1.0) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data) v = rng.gaussian(0.0, scale);
  return t;
}

// Runs one analytic-vs-central-difference comparison: `build` constructs the
// scalar loss node on a fresh graph from the current parameter values.
inline double check_case(std::vector<isv::num::ParamTensor<double>*> params,
                         const std::function<Graph<double>::Ref(Graph<double>&)>& build,
                         uint64_t fd_seed) {
  for (auto* p : params) p->zero_grad();
  {
    Graph<double> g;
    g.backward(build(g));
  }
  auto forward = [&]() {
    Graph<double> g;
    return g.value(build(g)).ptr()[0];
  };
  isv::num::GradCheckOptions opt;
  opt.seed = fd_seed;
  return isv::num::finite_diff_check(params, forward, opt);
}

// ---- individual layer types -------------------------------------------------

inline double check_dense(uint64_t seed) {
  Rng rng(seed);
  const int in = 2 + static_cast<int>(rng.uniform_int(6));
  const int out = 1 + static_cast<int>(rng.uniform_int(6));
  const int batch = 1 + static_cast<int>(rng.uniform_int(5));
  isv::num::Dense<double> d("d", in, out, isv::num::Init::kHe, rng);
  Tensor<double> x = randn({batch, in}, rng);
  Tensor<double> mix = randn({batch, out}, rng);
  auto params = d.params().all();
  return check_case(params, [&](Graph<double>& g) {
    return g.sum(g.mul(d.forward(g, g.input(x)), g.input(mix)));
  }, seed ^ 0xfd);
}

inline double check_conv2d(uint64_t seed) {
  Rng rng(seed);
  const int C = 1 + static_cast<int>(rng.uniform_int(3));
  const int F = 1 + static_cast<int>(rng.uniform_int(4));
  const int H = 4 + static_cast<int>(rng.uniform_int(4));
  const int W = 4 + static_cast<int>(rng.uniform_int(4));
  const int k = 1 + 2 * static_cast<int>(rng.uniform_int(2));  // 1 or 3
  const int stride = 1 + static_cast<int>(rng.uniform_int(2));
  const int pad = static_cast<int>(rng.uniform_int(2));
  isv::num::Conv2d<double> conv("c", C, F, k, k, stride, pad, isv::num::Init::kHe, rng);
  Tensor<double> x = randn({2, C, H, W}, rng);
  const int HO = (H + 2 * pad - k) / stride + 1;
  const int WO = (W + 2 * pad - k) / stride + 1;
  Tensor<double> mix = randn({2, F, HO, WO}, rng);
  auto params = conv.params().all();
  return check_case(params, [&](Graph<double>& g) {
    auto y = conv.forward(g, g.input(x));
    return g.sum(g.mul(g.flatten(y), g.flatten(g.input(mix))));
  }, seed ^ 0xfd);
}

inline double check_mfm(uint64_t seed) {
  Rng rng(seed);
  const int in = 3 + static_cast<int>(rng.uniform_int(5));
  const int out = 2 * (1 + static_cast<int>(rng.uniform_int(4)));
  const int batch = 1 + static_cast<int>(rng.uniform_int(5));
  isv::num::Dense<double> d("d", in, out, isv::num::Init::kHe, rng);
  Tensor<double> x = randn({batch, in}, rng);
  Tensor<double> mix = randn({batch, out / 2}, rng);
  auto params = d.params().all();
  return check_case(params, [&](Graph<double>& g) {
    return g.sum(g.mul(g.mfm(d.forward(g, g.input(x))), g.input(mix)));
  }, seed ^ 0xfd);
}

inline double check_activation(uint64_t seed, isv::num::Activation kind) {
  Rng rng(seed);
  const int in = 2 + static_cast<int>(rng.uniform_int(6));
  const int out = 2 + static_cast<int>(rng.uniform_int(5));
  const int batch = 1 + static_cast<int>(rng.uniform_int(5));
  isv::num::Dense<double> d("d", in, out, isv::num::Init::kXavier, rng);
  Tensor<double> x = randn({batch, in}, rng);
  Tensor<double> mix = randn({batch, out}, rng);
  auto params = d.params().all();
  return check_case(params, [&](Graph<double>& g) {
    auto y = isv::num::activation_apply(g, d.forward(g, g.input(x)), kind);
    return g.sum(g.mul(y, g.input(mix)));
  }, seed ^ 0xfd);
}

inline double check_maxpool(uint64_t seed) {
  Rng rng(seed);
  const int C = 1 + static_cast<int>(rng.uniform_int(3));
  isv::num::Conv2d<double> conv("c", 1, C, 3, 3, 1, 1, isv::num::Init::kHe, rng);
  Tensor<double> x = randn({2, 1, 6, 8}, rng);
  Tensor<double> mix = randn({2, C, 3, 4}, rng);
  auto params = conv.params().all();
  return check_case(params, [&](Graph<double>& g) {
    auto y = g.maxpool2d(conv.forward(g, g.input(x)), 2);
    return g.sum(g.mul(g.flatten(y), g.flatten(g.input(mix))));
  }, seed ^ 0xfd);
}

// temporal mean + flatten + concat + elementwise product + gather, the glue
// ops the two models are assembled from.
inline double check_fusion_ops(uint64_t seed) {
  Rng rng(seed);
  const int E = 3 + static_cast<int>(rng.uniform_int(4));
  isv::num::Dense<double> d("d", 2 * E, 3, isv::num::Init::kHe, rng);
  Tensor<double> a = randn({4, E}, rng);
  Tensor<double> b = randn({4, E}, rng);
  Tensor<double> mix = randn({3, 3}, rng);
  auto params = d.params().all();
  return check_case(params, [&](Graph<double>& g) {
    auto ar = g.input(a);
    auto br = g.input(b);
    auto cat = g.concat_cols({ar, g.mul(ar, br)});
    auto picked = g.gather_rows(d.forward(g, cat), {0, 2, 3});
    return g.sum(g.mul(picked, g.input(mix)));
  }, seed ^ 0xfd);
}

// ---- losses ------------------------------------------------------------------

inline double check_bce_loss(uint64_t seed) {
  Rng rng(seed);
  const int in = 2 + static_cast<int>(rng.uniform_int(5));
  const int batch = 1 + static_cast<int>(rng.uniform_int(8));
  isv::num::Dense<double> d("d", in, 1, isv::num::Init::kXavier, rng);
  Tensor<double> x = randn({batch, in}, rng);
  std::vector<double> y;
  for (int i = 0; i < batch; ++i) y.push_back(rng.uniform() < 0.5 ? 0.0 : 1.0);
  auto params = d.params().all();
  return check_case(params, [&](Graph<double>& g) {
    return isv::loss::bce(g, g.sigmoid(d.forward(g, g.input(x))), y);
  }, seed ^ 0xfd);
}

inline double check_cce_loss(uint64_t seed) {
  Rng rng(seed);
  const int in = 2 + static_cast<int>(rng.uniform_int(5));
  const int classes = 2 + static_cast<int>(rng.uniform_int(5));
  const int batch = 1 + static_cast<int>(rng.uniform_int(8));
  isv::num::Dense<double> d("d", in, classes, isv::num::Init::kXavier, rng);
  Tensor<double> x = randn({batch, in}, rng);
  std::vector<int> y;
  for (int i = 0; i < batch; ++i) y.push_back(static_cast<int>(rng.uniform_int(classes)));
  auto params = d.params().all();
  return check_case(params, [&](Graph<double>& g) {
    return isv::loss::cce(g, d.forward(g, g.input(x)), y);
  }, seed ^ 0xfd);
}

// ---- full models ---------------------------------------------------------------

// Modular back-end under the alpha-weighted objective (Eq. 2 path).
inline double check_backend_model(uint64_t seed) {
  Rng rng(seed);
  const int E = 3 + static_cast<int>(rng.uniform_int(4));
  isv::model::BackendConfig cfg;
  cfg.hidden_layers = 2;
  cfg.nodes = 6 + static_cast<int>(rng.uniform_int(6));
  isv::model::BackendModel<double> model(cfg, E, rng);
  const int B = 4 + static_cast<int>(rng.uniform_int(5));
  Tensor<double> enroll = randn({B, E}, rng);
  Tensor<double> test = randn({B, E}, rng);
  Tensor<double> pad({B, 1});
  std::vector<double> sv_y;
  std::vector<int> isv_y;
  for (int i = 0; i < B; ++i) {
    pad.data[static_cast<size_t>(i)] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    sv_y.push_back(rng.uniform() < 0.5 ? 0.0 : 1.0);
    isv_y.push_back(static_cast<int>(rng.uniform_int(2)));
  }
  auto params = model.params();
  return check_case(params, [&](Graph<double>& g) {
    auto refs = model.forward(g, g.input(enroll), g.input(test), g.input(pad));
    auto ln = isv::loss::modular_loss(g, refs.sv_probs, sv_y, refs.isv_logits, isv_y, 20.0);
    return ln.total;
  }, seed ^ 0xfd);
}

// Monolithic model under the three-component objective (Eq. 1 path),
// including in-batch trial composition.
inline double check_e2e_model(uint64_t seed) {
  Rng rng(seed);
  isv::model::E2eConfig cfg;
  cfg.encoder.conv_blocks = 2;
  cfg.encoder.channels = {4, 4};
  cfg.encoder.input_bands = 8;
  cfg.encoder.embedding_dim = 4 + static_cast<int>(rng.uniform_int(4));
  cfg.isv_layers = 1;
  cfg.isv_nodes = 6;
  const int n_speakers = 2;
  isv::model::E2EModel<double> model(cfg, n_speakers, rng);

  const int frames = 4 + 2 * static_cast<int>(rng.uniform_int(2));
  // 4 utterances: two speakers, bona-fide plus one replay
  std::vector<isv::trial::BatchItem> items = {
      {0, "a", true}, {1, "a", true}, {2, "b", true}, {3, "a", false}};
  Tensor<double> x = randn({4, 1, frames, 8}, rng);
  std::vector<int> sid_y = {0, 0, 1, 0};
  std::vector<double> pad_y = {1, 1, 1, 0};

  auto params = model.params();
  return check_case(params, [&](Graph<double>& g) {
    auto refs = model.forward(g, g.input(x), items);
    std::vector<int> isv_y;
    for (const auto& t : refs.trials) isv_y.push_back(isv::model::isv_class_of(t.type));
    auto ln = isv::loss::e2e_loss(g, refs.sid_logits, sid_y, refs.pad_probs, pad_y,
                                  refs.isv_logits, isv_y);
    return ln.total;
  }, seed ^ 0xfd);
}

// ---- suite runner ---------------------------------------------------------------

struct CaseResult {
  std::string name;
  double max_rel = 0.0;
  int configs = 0;
};

inline std::vector<CaseResult> run_suite(int configs_per_case, uint64_t base_seed = 1000) {
  std::vector<std::pair<std::string, std::function<double(uint64_t)>>> cases = {
      {"dense", check_dense},
      {"conv2d", check_conv2d},
      {"mfm", check_mfm},
      {"relu", [](uint64_t s) { return check_activation(s, isv::num::Activation::kRelu); }},
      {"sigmoid",
       [](uint64_t s) { return check_activation(s, isv::num::Activation::kSigmoid); }},
      {"softmax",
       [](uint64_t s) { return check_activation(s, isv::num::Activation::kSoftmax); }},
      {"maxpool", check_maxpool},
      {"fusion_ops", check_fusion_ops},
      {"bce", check_bce_loss},
      {"cce", check_cce_loss},
      {"backend_model_eq2", check_backend_model},
      {"e2e_model_eq1", check_e2e_model},
  };
  std::vector<CaseResult> results;
  for (auto& [name, fn] : cases) {
    CaseResult r;
    r.name = name;
    for (int i = 0; i < configs_per_case; ++i) {
      r.max_rel = std::max(r.max_rel, fn(base_seed + static_cast<uint64_t>(i)));
      ++r.configs;
    }
    results.push_back(r);
  }
  return results;
}

}  // namespace gradsuite

#endif  // ISVKIT_TESTS_GRADSUITE_H_
