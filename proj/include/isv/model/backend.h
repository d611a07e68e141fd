// isv/model/backend.h

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

#ifndef ISV_MODEL_BACKEND_H_
#define ISV_MODEL_BACKEND_H_

#include <array>
#include <string>
#include <vector>

#include "isv/num/layers.h"
#include "isv/rng.h"

namespace isv {
namespace model {

// The phase-2 module: an SV branch over [enroll, test, enroll*test] and a
// final 2-node layer over [shaped_sv, pad, shaped_sv*pad].
struct BackendConfig {
  int hidden_layers = 4;
  int nodes = 256;
  double alpha = 20.0;               // SV-loss weight
  bool pad_labels_in_training = true;  // ground-truth PAD labels in phase 2
  void validate() const {
    if (hidden_layers < 1) throw ConfigError("backend: hidden_layers must be >= 1");
    if (nodes < 1) throw ConfigError("backend: nodes must be >= 1");
    if (alpha < 0) throw ConfigError("backend: alpha must be >= 0");
  }
};

// Scalar score shaping: sigmoid(relu(x)).  Maps all reals into [0.5, 1) and
// every non-positive raw SV output to exactly 0.5, which pins the zero-effort
// mode of the final-score distribution.
inline double shape_sv_score(double raw) {
  const double r = raw > 0.0 ? raw : 0.0;
  return 1.0 / (1.0 + std::exp(-r));
}

// Single-pair inference output.
struct BackendOutput {
  double raw_sv;                    // pre-sigmoid SV branch output
  double sv_prob;                   // sigmoid(raw_sv), in (0,1)
  double shaped_sv;                 // sigmoid(relu(raw_sv)), in [0.5,1)
  std::array<double, 2> isv_probs;  // {acceptance, rejection}, sums to 1
  double final_score;               // acceptance probability
};

template <typename T>
class BackendModel {
 public:
  using Ref = typename num::Graph<T>::Ref;

  struct Refs {
    Ref raw_sv;      // B x 1
    Ref sv_probs;    // B x 1
    Ref shaped;      // B x 1
    Ref isv_logits;  // B x 2
    Ref isv_probs;   // B x 2, acceptance node first
  };

  BackendModel(const BackendConfig& cfg, int embedding_dim, Rng& rng)
      : cfg_(cfg), embedding_dim_(embedding_dim) {
    cfg_.validate();
    if (embedding_dim < 1) throw ConfigError("backend: embedding_dim must be >= 1");
    int in = 3 * embedding_dim;
    for (int l = 0; l < cfg_.hidden_layers; ++l) {
      hidden_.emplace_back("backend.fc" + std::to_string(l), in, cfg_.nodes, num::Init::kHe,
                           rng);
      in = cfg_.nodes;
    }
    sv_out_ = std::make_unique<num::Dense<T>>("backend.sv_out", in, 1, num::Init::kXavier, rng);
    final_fc_ = std::make_unique<num::Dense<T>>("backend.final", 3, 2, num::Init::kXavier, rng);
  }

  // enroll, test: B x E embedding leaves; pad: B x 1 leaf of PAD inputs
  // (ground-truth labels during training, PAD-system probabilities at
  // inference; values must lie in [0,1]).
  Refs forward(num::Graph<T>& g, Ref enroll, Ref test, Ref pad) {
    const auto& E = g.value(enroll);
    const auto& Tt = g.value(test);
    if (E.ndim() != 2 || Tt.ndim() != 2 || E.dim(1) != Tt.dim(1))
      throw DataError(strcat_msg("backend: embedding dims differ, enroll ",
                                 num::shape_str(E.shape), " vs test ",
                                 num::shape_str(Tt.shape)));
    if (E.dim(1) != embedding_dim_)
      throw DataError(strcat_msg("backend: model built for dim ", embedding_dim_,
                                 ", embeddings have dim ", E.dim(1)));
    for (auto v : g.value(pad).data)
      if (v < T(0) || v > T(1))
        throw DataError(strcat_msg("backend: PAD input ", static_cast<double>(v),
                                   " outside [0,1]"));
    Ref h = g.concat_cols({enroll, test, g.mul(enroll, test)});
    for (auto& fc : hidden_) h = g.relu(fc.forward(g, h));
    Ref raw = sv_out_->forward(g, h);
    Ref svp = g.sigmoid(raw);
    Ref shaped = g.sigmoid(g.relu(raw));
    Ref fin = g.concat_cols({shaped, pad, g.mul(shaped, pad)});
    Ref logits = final_fc_->forward(g, fin);
    return Refs{raw, svp, shaped, logits, g.softmax_rows(logits)};
  }

  // SV branch only, for one pair: (raw scalar, sigmoid probability).
  std::pair<double, double> sv_branch(const std::vector<T>& enroll,
                                      const std::vector<T>& test) {
    if (enroll.size() != test.size())
      throw DataError(strcat_msg("backend: embedding dims differ, enroll ", enroll.size(),
                                 " vs test ", test.size()));
    num::Graph<T> g;
    auto e = g.input(num::Tensor<T>({1, static_cast<int64_t>(enroll.size())}, enroll));
    auto t = g.input(num::Tensor<T>({1, static_cast<int64_t>(test.size())}, test));
    auto p = g.input(num::Tensor<T>::full({1, 1}, T(1)));
    Refs r = forward(g, e, t, p);
    return {static_cast<double>(g.value(r.raw_sv).ptr()[0]),
            static_cast<double>(g.value(r.sv_probs).ptr()[0])};
  }

  // Full single-pair forward with a PAD input in [0,1].
  BackendOutput infer(const std::vector<T>& enroll, const std::vector<T>& test, double pad) {
    num::Graph<T> g;
    auto e = g.input(num::Tensor<T>({1, static_cast<int64_t>(enroll.size())}, enroll));
    auto t = g.input(num::Tensor<T>({1, static_cast<int64_t>(test.size())}, test));
    auto p = g.input(num::Tensor<T>::full({1, 1}, static_cast<T>(pad)));
    Refs r = forward(g, e, t, p);
    BackendOutput out;
    out.raw_sv = static_cast<double>(g.value(r.raw_sv).ptr()[0]);
    out.sv_prob = static_cast<double>(g.value(r.sv_probs).ptr()[0]);
    out.shaped_sv = static_cast<double>(g.value(r.shaped).ptr()[0]);
    out.isv_probs = {static_cast<double>(g.value(r.isv_probs).ptr()[0]),
                     static_cast<double>(g.value(r.isv_probs).ptr()[1])};
    out.final_score = out.isv_probs[0];
    return out;
  }

  std::vector<num::ParamTensor<T>*> params() {
    std::vector<num::ParamTensor<T>*> out;
    for (auto& fc : hidden_)
      for (auto* p : fc.params().all()) out.push_back(p);
    for (auto* p : sv_out_->params().all()) out.push_back(p);
    for (auto* p : final_fc_->params().all()) out.push_back(p);
    return out;
  }

  const BackendConfig& config() const { return cfg_; }
  int embedding_dim() const { return embedding_dim_; }

 private:
  BackendConfig cfg_;
  int embedding_dim_;
  std::vector<num::Dense<T>> hidden_;
  std::unique_ptr<num::Dense<T>> sv_out_;
  std::unique_ptr<num::Dense<T>> final_fc_;
};

// Small MLP over embeddings used as the PAD system for the embedding-level
// synthetic world.
template <typename T>
class PadClassifier {
 public:
  using Ref = typename num::Graph<T>::Ref;

  PadClassifier(int embedding_dim, int hidden, Rng& rng)
      : h1_("padnet.fc", embedding_dim, hidden, num::Init::kHe, rng),
        out_("padnet.out", hidden, 1, num::Init::kXavier, rng) {}

  Ref forward(num::Graph<T>& g, Ref x) {
    return g.sigmoid(out_.forward(g, g.relu(h1_.forward(g, x))));
  }

  std::vector<num::ParamTensor<T>*> params() {
    std::vector<num::ParamTensor<T>*> out;
    for (auto* p : h1_.params().all()) out.push_back(p);
    for (auto* p : out_.params().all()) out.push_back(p);
    return out;
  }

 private:
  num::Dense<T> h1_;
  num::Dense<T> out_;
};

}  // namespace model
}  // namespace isv

#endif  // ISV_MODEL_BACKEND_H_
