// isv/loss/losses.h

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

#ifndef ISV_LOSS_LOSSES_H_
#define ISV_LOSS_LOSSES_H_

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "isv/common.h"
#include "isv/num/graph.h"

namespace isv {
namespace loss {

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before any log.
inline constexpr double kProbClamp = 1e-7;

// Per-component values for one batch; `total` is always the exact documented
// combination of the present components.
struct LossReport {
  std::optional<double> sid;
  std::optional<double> pad;
  std::optional<double> isv;
  std::optional<double> sv;
  double total = 0.0;
  int64_t batch = 0;

  // One log line per step, key=value.
  std::string to_kv() const {
    std::string s;
    if (sid) s += "sid=" + fmt_g17(*sid) + " ";
    if (pad) s += "pad=" + fmt_g17(*pad) + " ";
    if (isv) s += "isv=" + fmt_g17(*isv) + " ";
    if (sv) s += "sv=" + fmt_g17(*sv) + " ";
    s += "total=" + fmt_g17(total) + " batch=" + std::to_string(batch);
    return s;
  }
};

template <typename T>
void require_binary_labels(const std::vector<T>& labels) {
  for (T y : labels)
    if (y != T(0) && y != T(1))
      throw DataError(strcat_msg("bce: label ", static_cast<double>(y), " outside {0,1}"));
}

// -mean(y log p + (1-y) log(1-p)) over clamped probabilities.
template <typename T>
T bce_value(const std::vector<T>& probs, const std::vector<T>& labels) {
  if (probs.size() != labels.size())
    throw DataError(strcat_msg("bce: ", probs.size(), " predictions vs ", labels.size(),
                               " labels"));
  if (probs.empty()) throw DataError("bce: empty batch");
  require_binary_labels(labels);
  const T lo = static_cast<T>(kProbClamp), hi = T(1) - static_cast<T>(kProbClamp);
  T acc = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    T p = std::min(std::max(probs[i], lo), hi);
    acc += -(labels[i] * std::log(p) + (T(1) - labels[i]) * std::log(T(1) - p));
  }
  return acc / static_cast<T>(probs.size());
}

// -mean log softmax(logits)[label], stabilized by max subtraction.
template <typename T>
T cce_value(const num::Tensor<T>& logits, const std::vector<int>& labels) {
  if (logits.ndim() != 2)
    throw DataError(strcat_msg("cce: logits must be 2-d, got ", num::shape_str(logits.shape)));
  const int64_t N = logits.dim(0), C = logits.dim(1);
  if (static_cast<int64_t>(labels.size()) != N)
    throw DataError(strcat_msg("cce: ", N, " rows vs ", labels.size(), " labels"));
  if (N == 0) throw DataError("cce: empty batch");
  T acc = 0;
  for (int64_t n = 0; n < N; ++n) {
    const int y = labels[static_cast<size_t>(n)];
    if (y < 0 || y >= C)
      throw DataError(strcat_msg("cce: label ", y, " out of range [0,", C, ")"));
    const T* row = logits.ptr() + n * C;
    T mx = row[0];
    for (int64_t c = 1; c < C; ++c) mx = std::max(mx, row[c]);
    T lse = 0;
    for (int64_t c = 0; c < C; ++c) lse += std::exp(row[c] - mx);
    acc += -(row[y] - mx - std::log(lse));
  }
  return acc / static_cast<T>(N);
}

// Graph node: BCE of a probability column (N x 1 or flat N).
// d/dp = (p - y) / (p (1-p) N) inside the clamp range, 0 where clamped.
template <typename T>
typename num::Graph<T>::Ref bce(num::Graph<T>& g, typename num::Graph<T>::Ref probs,
                                std::vector<T> labels) {
  using Ref = typename num::Graph<T>::Ref;
  const num::Tensor<T>& P = g.value(probs);
  std::vector<T> pvec(P.data.begin(), P.data.end());
  num::Tensor<T> out({1});
  out.ptr()[0] = bce_value(pvec, labels);
  const int64_t N = P.numel();
  Ref self = g.make_node(std::move(out));
  g.set_back(self, [probs, self, labels = std::move(labels), N](num::Graph<T>& gg) {
    const T gscale = gg.grad(self).ptr()[0];
    const num::Tensor<T>& P2 = gg.value(probs);
    num::Tensor<T>& gp = gg.grad_buffer(probs);
    const T lo = static_cast<T>(kProbClamp), hi = T(1) - static_cast<T>(kProbClamp);
    for (int64_t i = 0; i < N; ++i) {
      const T p = P2.ptr()[i];
      if (p < lo || p > hi) continue;
      const T y = labels[static_cast<size_t>(i)];
      gp.ptr()[i] += gscale * (p - y) / (p * (T(1) - p) * static_cast<T>(N));
    }
  });
  return self;
}

// Graph node: CCE of an N x C logits matrix.  d/dlogits = (softmax - onehot)/N.
template <typename T>
typename num::Graph<T>::Ref cce(num::Graph<T>& g, typename num::Graph<T>::Ref logits,
                                std::vector<int> labels) {
  using Ref = typename num::Graph<T>::Ref;
  const num::Tensor<T>& L = g.value(logits);
  num::Tensor<T> out({1});
  out.ptr()[0] = cce_value(L, labels);
  const int64_t N = L.dim(0), C = L.dim(1);
  Ref self = g.make_node(std::move(out));
  g.set_back(self, [logits, self, labels = std::move(labels), N, C](num::Graph<T>& gg) {
    const T gscale = gg.grad(self).ptr()[0];
    const num::Tensor<T>& L2 = gg.value(logits);
    num::Tensor<T>& gl = gg.grad_buffer(logits);
    for (int64_t n = 0; n < N; ++n) {
      const T* row = L2.ptr() + n * C;
      T mx = row[0];
      for (int64_t c = 1; c < C; ++c) mx = std::max(mx, row[c]);
      T lse = 0;
      for (int64_t c = 0; c < C; ++c) lse += std::exp(row[c] - mx);
      const int y = labels[static_cast<size_t>(n)];
      for (int64_t c = 0; c < C; ++c) {
        const T s = std::exp(row[c] - mx) / lse;
        gl.ptr()[n * C + c] +=
            gscale * (s - (c == y ? T(1) : T(0))) / static_cast<T>(N);
      }
    }
  });
  return self;
}

// Optional per-component weights for the joint objective.  Defaults to the
// printed unit weights; overridable for experiments only.
struct E2eLossWeights {
  double sid = 1.0, pad = 1.0, isv = 1.0;
};

template <typename T>
struct LossNode {
  typename num::Graph<T>::Ref total;
  LossReport report;
};

// total = sid + pad + isv (unit weights unless overridden).
template <typename T>
LossNode<T> e2e_loss(num::Graph<T>& g, typename num::Graph<T>::Ref sid_logits,
                     std::vector<int> sid_labels, typename num::Graph<T>::Ref pad_probs,
                     std::vector<T> pad_labels, typename num::Graph<T>::Ref isv_logits,
                     std::vector<int> isv_labels, const E2eLossWeights& w = {}) {
  if (isv_labels.empty()) throw DataError("e2e_loss: empty trial set");
  const int64_t batch = g.value(sid_logits).dim(0);
  auto l_sid = cce(g, sid_logits, std::move(sid_labels));
  auto l_pad = bce(g, pad_probs, std::move(pad_labels));
  auto l_isv = cce(g, isv_logits, std::move(isv_labels));
  auto total = g.add(g.add(g.scale(l_sid, static_cast<T>(w.sid)),
                           g.scale(l_pad, static_cast<T>(w.pad))),
                     g.scale(l_isv, static_cast<T>(w.isv)));
  LossReport r;
  r.sid = static_cast<double>(g.value(l_sid).ptr()[0]);
  r.pad = static_cast<double>(g.value(l_pad).ptr()[0]);
  r.isv = static_cast<double>(g.value(l_isv).ptr()[0]);
  r.total = static_cast<double>(g.value(total).ptr()[0]);
  r.batch = batch;
  return {total, r};
}

// total = alpha * sv_bce + isv_cce.
template <typename T>
LossNode<T> modular_loss(num::Graph<T>& g, typename num::Graph<T>::Ref sv_probs,
                         std::vector<T> sv_labels, typename num::Graph<T>::Ref isv_logits,
                         std::vector<int> isv_labels, double alpha) {
  if (alpha < 0) throw ConfigError("modular_loss: alpha must be >= 0");
  const int64_t batch = g.value(isv_logits).dim(0);
  auto l_sv = bce(g, sv_probs, std::move(sv_labels));
  auto l_isv = cce(g, isv_logits, std::move(isv_labels));
  auto total = g.add(g.scale(l_sv, static_cast<T>(alpha)), l_isv);
  LossReport r;
  r.sv = static_cast<double>(g.value(l_sv).ptr()[0]);
  r.isv = static_cast<double>(g.value(l_isv).ptr()[0]);
  r.total = static_cast<double>(g.value(total).ptr()[0]);
  r.batch = batch;
  return {total, r};
}

}  // namespace loss
}  // namespace isv

#endif  // ISV_LOSS_LOSSES_H_
