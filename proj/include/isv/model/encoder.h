// isv/model/encoder.h

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

#ifndef ISV_MODEL_ENCODER_H_
#define ISV_MODEL_ENCODER_H_

#include <string>
#include <vector>

#include "isv/num/amsgrad.h"
#include "isv/num/layers.h"
#include "isv/rng.h"

namespace isv {
namespace model {

// Miniature MFM-CNN encoder: conv blocks with max-feature-map activations and
// 2x2 pooling, temporal mean pooling so utterance length is free, then a
// dense layer whose (MFM-activated) output is the speaker embedding.
struct EncoderConfig {
  int conv_blocks = 3;
  std::vector<int> channels = {8, 16, 16};  // per block, before the MFM halving
  bool mfm = true;
  int pool = 2;             // pooling window/stride after each block
  int embedding_dim = 64;   // 1024 supported; desk-scale default
  int kernel = 3;
  int input_bands = 64;
  int min_frames() const {
    int m = 1;
    for (int b = 0; b < conv_blocks; ++b) m *= pool;
    return m;
  }
  void validate() const {
    if (embedding_dim <= 0) throw ConfigError("encoder: embedding_dim must be > 0");
    if (conv_blocks < 1) throw ConfigError("encoder: need at least one conv block");
    if (static_cast<int>(channels.size()) != conv_blocks)
      throw ConfigError(strcat_msg("encoder: ", channels.size(), " channel counts for ",
                                   conv_blocks, " blocks"));
    if (mfm)
      for (int c : channels)
        if (c % 2 != 0)
          throw ConfigError(strcat_msg("encoder: channel count ", c,
                                       " must be even when MFM is enabled"));
    int w = input_bands;
    for (int b = 0; b < conv_blocks; ++b) w /= pool;
    if (w < 1) throw ConfigError("encoder: pooling schedule collapses the band axis");
  }
};

template <typename T>
class Encoder {
 public:
  using Ref = typename num::Graph<T>::Ref;

  Encoder(const EncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    int in_ch = 1;
    int w = cfg_.input_bands;
    for (int b = 0; b < cfg_.conv_blocks; ++b) {
      convs_.emplace_back("enc.conv" + std::to_string(b), in_ch, cfg_.channels[b], cfg_.kernel,
                          cfg_.kernel, 1, cfg_.kernel / 2, num::Init::kHe, rng);
      in_ch = cfg_.mfm ? cfg_.channels[b] / 2 : cfg_.channels[b];
      w /= cfg_.pool;
    }
    const int flat = in_ch * w;
    const int out = cfg_.mfm ? 2 * cfg_.embedding_dim : cfg_.embedding_dim;
    embed_ = std::make_unique<num::Dense<T>>("enc.embed", flat, out, num::Init::kHe, rng);
  }

  // x: N x 1 x frames x bands -> N x embedding_dim
  Ref embed(num::Graph<T>& g, Ref x) {
    const auto& X = g.value(x);
    if (X.ndim() != 4 || X.dim(3) != cfg_.input_bands)
      throw DataError(strcat_msg("encoder: expected N x 1 x frames x ", cfg_.input_bands,
                                 " input, got ", num::shape_str(X.shape)));
    if (X.dim(2) < cfg_.min_frames())
      throw DataError(strcat_msg("encoder: needs at least ", cfg_.min_frames(),
                                 " frames, got ", X.dim(2)));
    Ref h = x;
    for (auto& conv : convs_) {
      h = conv.forward(g, h);
      if (cfg_.mfm) h = g.mfm(h);
      h = g.maxpool2d(h, cfg_.pool);
    }
    h = g.flatten(g.temporal_mean(h));
    h = embed_->forward(g, h);
    return cfg_.mfm ? g.mfm(h) : g.relu(h);
  }

  std::vector<num::ParamTensor<T>*> params() {
    std::vector<num::ParamTensor<T>*> out;
    for (auto& c : convs_)
      for (auto* p : c.params().all()) out.push_back(p);
    for (auto* p : embed_->params().all()) out.push_back(p);
    return out;
  }

  const EncoderConfig& config() const { return cfg_; }

 private:
  EncoderConfig cfg_;
  std::vector<num::Conv2d<T>> convs_;
  std::unique_ptr<num::Dense<T>> embed_;
};

// Encoder plus SID softmax head and PAD sigmoid head.  Covers the separately
// trained SID/PAD systems (only one head's loss applied) and the MTL setup
// (both losses on the shared encoder).
template <typename T>
class FrontendModel {
 public:
  using Ref = typename num::Graph<T>::Ref;

  struct MtlRefs {
    Ref embeddings;  // N x E
    Ref sid_logits;  // N x S
    Ref pad_probs;   // N x 1
  };

  FrontendModel(const EncoderConfig& cfg, int n_speakers, Rng& rng)
      : enc_(cfg, rng),
        sid_head_("sid.head", cfg.embedding_dim, n_speakers, num::Init::kXavier, rng),
        pad_head_("pad.head", cfg.embedding_dim, 1, num::Init::kXavier, rng),
        n_speakers_(n_speakers) {
    if (n_speakers < 1) throw ConfigError("frontend: speaker count must be >= 1");
  }

  MtlRefs mtl_forward(num::Graph<T>& g, Ref x) {
    Ref emb = enc_.embed(g, x);
    return MtlRefs{emb, sid_head_.forward(g, emb), g.sigmoid(pad_head_.forward(g, emb))};
  }

  Ref embed(num::Graph<T>& g, Ref x) { return enc_.embed(g, x); }

  Encoder<T>& encoder() { return enc_; }
  int n_speakers() const { return n_speakers_; }

  std::vector<num::ParamTensor<T>*> params() {
    auto out = enc_.params();
    for (auto* p : sid_head_.params().all()) out.push_back(p);
    for (auto* p : pad_head_.params().all()) out.push_back(p);
    return out;
  }

 private:
  Encoder<T> enc_;
  num::Dense<T> sid_head_;
  num::Dense<T> pad_head_;
  int n_speakers_;
};

}  // namespace model
}  // namespace isv

#endif  // ISV_MODEL_ENCODER_H_
