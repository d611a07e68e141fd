// isv/model/e2e.h

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

#ifndef ISV_MODEL_E2E_H_
#define ISV_MODEL_E2E_H_

#include <string>
#include <vector>

#include "isv/model/encoder.h"
#include "isv/trial/trial.h"

namespace isv {
namespace model {

// Monolithic model: shared encoder with SID and PAD heads, plus an ISV stack
// that scores embedding pairs composed from the batch itself.
struct E2eConfig {
  EncoderConfig encoder;
  int isv_layers = 2;
  int isv_nodes = 256;
  void validate() const {
    encoder.validate();
    if (isv_layers < 1) throw ConfigError("e2e: isv_layers must be >= 1");
    if (isv_nodes < 1) throw ConfigError("e2e: isv_nodes must be >= 1");
  }
};

template <typename T>
class E2EModel {
 public:
  using Ref = typename num::Graph<T>::Ref;

  struct ForwardRefs {
    Ref embeddings;  // N x E
    Ref sid_logits;  // N x S
    Ref pad_probs;   // N x 1
    Ref isv_logits;  // B x 2, acceptance class first
    std::vector<trial::InBatchTrial> trials;
  };

  E2EModel(const E2eConfig& cfg, int n_speakers, Rng& rng)
      : cfg_(cfg), front_(cfg.encoder, n_speakers, rng) {
    cfg_.validate();
    int in = 2 * cfg.encoder.embedding_dim;
    for (int l = 0; l < cfg_.isv_layers; ++l) {
      isv_hidden_.emplace_back("isv.fc" + std::to_string(l), in, cfg_.isv_nodes,
                               num::Init::kHe, rng);
      in = cfg_.isv_nodes;
    }
    isv_out_ = std::make_unique<num::Dense<T>>("isv.out", in, 2, num::Init::kXavier, rng);
  }

  // Composes one trial per unordered batch pair (the bona-fide side enrolls)
  // and scores every composed trial.
  ForwardRefs forward(num::Graph<T>& g, Ref x, const std::vector<trial::BatchItem>& items) {
    return forward_with_trials(g, x, items,
                               trial::compose_inbatch_trials(items, /*ordered=*/false));
  }

  // Same, over an externally composed (e.g. balanced) trial list.
  ForwardRefs forward_with_trials(num::Graph<T>& g, Ref x,
                                  const std::vector<trial::BatchItem>& items,
                                  std::vector<trial::InBatchTrial> trials) {
    if (items.size() < 2) throw DataError("e2e: batch must contain at least 2 utterances");
    if (trials.empty()) throw DataError("e2e: no composable trials in batch");
    auto mtl = front_.mtl_forward(g, x);
    std::vector<int64_t> enroll_rows, test_rows;
    enroll_rows.reserve(trials.size());
    test_rows.reserve(trials.size());
    for (const auto& t : trials) {
      enroll_rows.push_back(t.enroll);
      test_rows.push_back(t.test);
    }
    Ref pair = g.concat_cols({g.gather_rows(mtl.embeddings, std::move(enroll_rows)),
                              g.gather_rows(mtl.embeddings, std::move(test_rows))});
    Ref h = pair;
    for (auto& fc : isv_hidden_) h = g.relu(fc.forward(g, h));
    Ref logits = isv_out_->forward(g, h);
    return ForwardRefs{mtl.embeddings, mtl.sid_logits, mtl.pad_probs, logits,
                       std::move(trials)};
  }

  FrontendModel<T>& frontend() { return front_; }

  std::vector<num::ParamTensor<T>*> params() {
    auto out = front_.params();
    for (auto& fc : isv_hidden_)
      for (auto* p : fc.params().all()) out.push_back(p);
    for (auto* p : isv_out_->params().all()) out.push_back(p);
    return out;
  }

  const E2eConfig& config() const { return cfg_; }

 private:
  E2eConfig cfg_;
  FrontendModel<T> front_;
  std::vector<num::Dense<T>> isv_hidden_;
  std::unique_ptr<num::Dense<T>> isv_out_;
};

// ISV trial label for the 2-class head: acceptance (class 0) only for target
// trials.
inline int isv_class_of(trial::TrialType t) {
  return t == trial::TrialType::kTarget ? 0 : 1;
}

// SV-branch training label: 1 for same-speaker pairs (target and replay),
// 0 for zero-effort pairs.
inline double sv_label_of(trial::TrialType t) {
  return t == trial::TrialType::kZeroEffort ? 0.0 : 1.0;
}

}  // namespace model
}  // namespace isv

#endif  // ISV_MODEL_E2E_H_
