// isv/num/graph.h

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

#ifndef ISV_NUM_GRAPH_H_
#define ISV_NUM_GRAPH_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "isv/num/tensor.h"

namespace isv {
namespace num {

// A named parameter tensor with its gradient accumulator.
template <typename T>
struct ParamTensor {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  ParamTensor() = default;
  ParamTensor(std::string n, Tensor<T> v)
      : name(std::move(n)), value(std::move(v)), grad(Tensor<T>::zeros(value.shape)) {}

  void zero_grad() { grad.fill(T(0)); }
};

// Reverse-mode tape.  Every operation appends a node holding its output value
// and a closure that propagates the node's gradient to its inputs.  Nodes only
// ever reference earlier nodes, so running the closures in reverse creation
// order is a valid topological sweep.  All loops are sequential with a fixed
// reduction order; two runs over the same inputs are bitwise identical.
template <typename T>
class Graph {
 public:
  struct Ref {
    int32_t idx = -1;
    bool valid() const { return idx >= 0; }
  };

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  const Tensor<T>& value(Ref r) const { return nodes_[static_cast<size_t>(r.idx)].value; }
  const Tensor<T>& grad(Ref r) const { return nodes_[static_cast<size_t>(r.idx)].grad; }
  size_t size() const { return nodes_.size(); }

  // ---- leaves ----

  Ref input(Tensor<T> v) { return push(std::move(v), nullptr); }

  // Leaf backed by an external parameter; backward() adds the node gradient
  // into p.grad.
  Ref param(ParamTensor<T>& p) {
    Ref r = push(p.value, nullptr);
    nodes_[static_cast<size_t>(r.idx)].bound = &p;
    return r;
  }

  // Appends an externally defined operation (used by the loss builders):
  // create the node first, then attach a backward closure that may capture
  // the returned Ref.  The closure must add into grad buffers of earlier
  // nodes only.
  Ref make_node(Tensor<T> v) { return push(std::move(v), nullptr); }

  void set_back(Ref r, std::function<void(Graph&)> back) {
    nodes_[static_cast<size_t>(r.idx)].back = std::move(back);
  }

  Tensor<T>& grad_buffer(Ref r) { return nodes_[static_cast<size_t>(r.idx)].grad; }

  // ---- elementwise and linear algebra ----

  Ref matmul(Ref a, Ref b) {
    const Tensor<T>& A = value(a);
    const Tensor<T>& B = value(b);
    if (A.ndim() != 2 || B.ndim() != 2 || A.dim(1) != B.dim(0))
      throw DataError(strcat_msg("matmul: incompatible shapes ", shape_str(A.shape),
                                 " and ", shape_str(B.shape)));
    const int64_t N = A.dim(0), K = A.dim(1), M = B.dim(1);
    Tensor<T> out({N, M});
    for (int64_t n = 0; n < N; ++n) {
      const T* arow = A.ptr() + n * K;
      T* orow = out.ptr() + n * M;
      for (int64_t k = 0; k < K; ++k) {
        const T v = arow[k];
        const T* brow = B.ptr() + k * M;
        for (int64_t m = 0; m < M; ++m) orow[m] += v * brow[m];
      }
    }
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [a, b, self, N, K, M](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      const Tensor<T>& A2 = g.value(a);
      const Tensor<T>& B2 = g.value(b);
      Tensor<T>& ga = g.grad_buffer(a);
      Tensor<T>& gb = g.grad_buffer(b);
      for (int64_t n = 0; n < N; ++n) {
        const T* gorow = go.ptr() + n * M;
        T* garow = ga.ptr() + n * K;
        for (int64_t k = 0; k < K; ++k) {
          const T* brow = B2.ptr() + k * M;
          T s = 0;
          for (int64_t m = 0; m < M; ++m) s += gorow[m] * brow[m];
          garow[k] += s;
        }
        const T* arow = A2.ptr() + n * K;
        for (int64_t k = 0; k < K; ++k) {
          const T v = arow[k];
          T* gbrow = gb.ptr() + k * M;
          for (int64_t m = 0; m < M; ++m) gbrow[m] += v * gorow[m];
        }
      }
    };
    return self;
  }

  // x: N x M, bias: flat M (or 1 x M).
  Ref add_rowvec(Ref x, Ref bias) {
    const Tensor<T>& X = value(x);
    const Tensor<T>& B = value(bias);
    const int64_t N = X.dim(0), M = X.dim(1);
    if (B.numel() != M)
      throw DataError(strcat_msg("add_rowvec: bias ", shape_str(B.shape),
                                 " does not match row width ", M));
    Tensor<T> out = X;
    for (int64_t n = 0; n < N; ++n)
      for (int64_t m = 0; m < M; ++m) out.ptr()[n * M + m] += B.ptr()[m];
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, bias, self, N, M](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      Tensor<T>& gx = g.grad_buffer(x);
      Tensor<T>& gb = g.grad_buffer(bias);
      for (int64_t i = 0; i < N * M; ++i) gx.ptr()[i] += go.ptr()[i];
      for (int64_t n = 0; n < N; ++n)
        for (int64_t m = 0; m < M; ++m) gb.ptr()[m] += go.ptr()[n * M + m];
    };
    return self;
  }

  Ref add(Ref a, Ref b) {
    const Tensor<T>& A = value(a);
    const Tensor<T>& B = value(b);
    require_same_shape(A, B, "add");
    Tensor<T> out = A;
    for (int64_t i = 0; i < out.numel(); ++i) out.ptr()[i] += B.ptr()[i];
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [a, b, self](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      Tensor<T>& ga = g.grad_buffer(a);
      Tensor<T>& gb = g.grad_buffer(b);
      for (int64_t i = 0; i < go.numel(); ++i) {
        ga.ptr()[i] += go.ptr()[i];
        gb.ptr()[i] += go.ptr()[i];
      }
    };
    return self;
  }

  Ref mul(Ref a, Ref b) {
    const Tensor<T>& A = value(a);
    const Tensor<T>& B = value(b);
    require_same_shape(A, B, "mul");
    Tensor<T> out = A;
    for (int64_t i = 0; i < out.numel(); ++i) out.ptr()[i] *= B.ptr()[i];
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [a, b, self](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      const Tensor<T>& A2 = g.value(a);
      const Tensor<T>& B2 = g.value(b);
      Tensor<T>& ga = g.grad_buffer(a);
      Tensor<T>& gb = g.grad_buffer(b);
      for (int64_t i = 0; i < go.numel(); ++i) {
        ga.ptr()[i] += go.ptr()[i] * B2.ptr()[i];
        gb.ptr()[i] += go.ptr()[i] * A2.ptr()[i];
      }
    };
    return self;
  }

  Ref scale(Ref a, T c) {
    Tensor<T> out = value(a);
    for (auto& v : out.data) v *= c;
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [a, c, self](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      Tensor<T>& ga = g.grad_buffer(a);
      for (int64_t i = 0; i < go.numel(); ++i) ga.ptr()[i] += c * go.ptr()[i];
    };
    return self;
  }

  // ---- activations ----

  Ref relu(Ref x) {
    Tensor<T> out = value(x);
    for (auto& v : out.data) v = v > T(0) ? v : T(0);
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, self](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      const Tensor<T>& X = g.value(x);
      Tensor<T>& gx = g.grad_buffer(x);
      for (int64_t i = 0; i < go.numel(); ++i)
        if (X.ptr()[i] > T(0)) gx.ptr()[i] += go.ptr()[i];
    };
    return self;
  }

  Ref sigmoid(Ref x) {
    Tensor<T> out = value(x);
    for (auto& v : out.data) v = stable_sigmoid(v);
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, self](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      const Tensor<T>& S = g.value(self);
      Tensor<T>& gx = g.grad_buffer(x);
      for (int64_t i = 0; i < go.numel(); ++i) {
        const T s = S.ptr()[i];
        gx.ptr()[i] += go.ptr()[i] * s * (T(1) - s);
      }
    };
    return self;
  }

  // Row-wise softmax over the class axis of an N x C matrix.
  Ref softmax_rows(Ref x) {
    const Tensor<T>& X = value(x);
    if (X.ndim() != 2)
      throw DataError(strcat_msg("softmax_rows: expected 2-d input, got ", shape_str(X.shape)));
    const int64_t N = X.dim(0), C = X.dim(1);
    Tensor<T> out({N, C});
    for (int64_t n = 0; n < N; ++n) {
      const T* row = X.ptr() + n * C;
      T* orow = out.ptr() + n * C;
      T mx = row[0];
      for (int64_t c = 1; c < C; ++c) mx = std::max(mx, row[c]);
      T sum = 0;
      for (int64_t c = 0; c < C; ++c) {
        orow[c] = std::exp(row[c] - mx);
        sum += orow[c];
      }
      for (int64_t c = 0; c < C; ++c) orow[c] /= sum;
    }
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, self, N, C](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      const Tensor<T>& S = g.value(self);
      Tensor<T>& gx = g.grad_buffer(x);
      for (int64_t n = 0; n < N; ++n) {
        const T* grow = go.ptr() + n * C;
        const T* srow = S.ptr() + n * C;
        T dot = 0;
        for (int64_t c = 0; c < C; ++c) dot += grow[c] * srow[c];
        T* gxrow = gx.ptr() + n * C;
        for (int64_t c = 0; c < C; ++c) gxrow[c] += srow[c] * (grow[c] - dot);
      }
    };
    return self;
  }

  // Max-feature-map: splits the channel axis in half and takes the
  // elementwise max.  Ties route the gradient to the first half.  Accepts
  // N x 2K matrices or N x 2C x H x W maps.
  Ref mfm(Ref x) {
    const Tensor<T>& X = value(x);
    if (X.ndim() != 2 && X.ndim() != 4)
      throw DataError(strcat_msg("mfm: expected 2-d or 4-d input, got ", shape_str(X.shape)));
    const int64_t ch = X.dim(1);
    if (ch % 2 != 0)
      throw DataError(strcat_msg("mfm: channel count ", ch, " is odd in ", shape_str(X.shape)));
    const int64_t half = ch / 2;
    const int64_t inner = X.ndim() == 4 ? X.dim(2) * X.dim(3) : 1;
    const int64_t N = X.dim(0);
    std::vector<int64_t> oshape = X.shape;
    oshape[1] = half;
    Tensor<T> out(oshape);
    for (int64_t n = 0; n < N; ++n)
      for (int64_t c = 0; c < half; ++c)
        for (int64_t i = 0; i < inner; ++i) {
          const T a = X.ptr()[(n * ch + c) * inner + i];
          const T b = X.ptr()[(n * ch + c + half) * inner + i];
          out.ptr()[(n * half + c) * inner + i] = a >= b ? a : b;
        }
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, self, N, half, ch, inner](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      const Tensor<T>& X2 = g.value(x);
      Tensor<T>& gx = g.grad_buffer(x);
      for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < half; ++c)
          for (int64_t i = 0; i < inner; ++i) {
            const int64_t ia = (n * ch + c) * inner + i;
            const int64_t ib = (n * ch + c + half) * inner + i;
            const T gv = go.ptr()[(n * half + c) * inner + i];
            if (X2.ptr()[ia] >= X2.ptr()[ib])
              gx.ptr()[ia] += gv;
            else
              gx.ptr()[ib] += gv;
          }
    };
    return self;
  }

  // ---- convolution and pooling ----

  // Cross-correlation of x: N x C x H x W with w: F x C x KH x KW plus bias
  // per output channel.  Output spatial dims: floor((H + 2p - KH)/stride) + 1.
  Ref conv2d(Ref x, Ref w, Ref bias, int stride, int pad) {
    const Tensor<T>& X = value(x);
    const Tensor<T>& W = value(w);
    if (X.ndim() != 4 || W.ndim() != 4)
      throw DataError("conv2d: input and kernel must be 4-d");
    const int64_t N = X.dim(0), C = X.dim(1), H = X.dim(2), Wd = X.dim(3);
    const int64_t F = W.dim(0), KC = W.dim(1), KH = W.dim(2), KW = W.dim(3);
    if (KC != C)
      throw DataError(strcat_msg("conv2d: kernel channels ", KC, " != input channels ", C));
    if (KH > H + 2 * pad || KW > Wd + 2 * pad)
      throw DataError(strcat_msg("conv2d: kernel ", KH, "x", KW,
                                 " larger than padded input ", H + 2 * pad, "x", Wd + 2 * pad));
    if (value(bias).numel() != F)
      throw DataError("conv2d: bias size must equal output channel count");
    const int64_t HO = (H + 2 * pad - KH) / stride + 1;
    const int64_t WO = (Wd + 2 * pad - KW) / stride + 1;
    Tensor<T> out({N, F, HO, WO});
    const T* bp = value(bias).ptr();
    for (int64_t n = 0; n < N; ++n)
      for (int64_t f = 0; f < F; ++f) {
        T* oplane = out.ptr() + (n * F + f) * HO * WO;
        for (int64_t i = 0; i < HO * WO; ++i) oplane[i] = bp[f];
        for (int64_t c = 0; c < C; ++c) {
          const T* xplane = X.ptr() + (n * C + c) * H * Wd;
          const T* wplane = W.ptr() + (f * C + c) * KH * KW;
          for (int64_t ho = 0; ho < HO; ++ho)
            for (int64_t kh = 0; kh < KH; ++kh) {
              const int64_t h = ho * stride + kh - pad;
              if (h < 0 || h >= H) continue;
              const T* xrow = xplane + h * Wd;
              const T* wrow = wplane + kh * KW;
              T* orow = oplane + ho * WO;
              for (int64_t wo = 0; wo < WO; ++wo) {
                T acc = 0;
                const int64_t w0 = wo * stride - pad;
                for (int64_t kw = 0; kw < KW; ++kw) {
                  const int64_t ww = w0 + kw;
                  if (ww < 0 || ww >= Wd) continue;
                  acc += xrow[ww] * wrow[kw];
                }
                orow[wo] += acc;
              }
            }
        }
      }
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, w, bias, self, stride, pad, N, C, H, Wd, F,
                                                  KH, KW, HO, WO](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      const Tensor<T>& X2 = g.value(x);
      const Tensor<T>& W2 = g.value(w);
      Tensor<T>& gx = g.grad_buffer(x);
      Tensor<T>& gw = g.grad_buffer(w);
      Tensor<T>& gb = g.grad_buffer(bias);
      for (int64_t n = 0; n < N; ++n)
        for (int64_t f = 0; f < F; ++f) {
          const T* gplane = go.ptr() + (n * F + f) * HO * WO;
          for (int64_t i = 0; i < HO * WO; ++i) gb.ptr()[f] += gplane[i];
          for (int64_t c = 0; c < C; ++c) {
            const T* xplane = X2.ptr() + (n * C + c) * H * Wd;
            const T* wplane = W2.ptr() + (f * C + c) * KH * KW;
            T* gxplane = gx.ptr() + (n * C + c) * H * Wd;
            T* gwplane = gw.ptr() + (f * C + c) * KH * KW;
            for (int64_t ho = 0; ho < HO; ++ho)
              for (int64_t kh = 0; kh < KH; ++kh) {
                const int64_t h = ho * stride + kh - pad;
                if (h < 0 || h >= H) continue;
                const T* xrow = xplane + h * Wd;
                T* gxrow = gxplane + h * Wd;
                const T* wrow = wplane + kh * KW;
                T* gwrow = gwplane + kh * KW;
                const T* grow = gplane + ho * WO;
                for (int64_t wo = 0; wo < WO; ++wo) {
                  const T gv = grow[wo];
                  if (gv == T(0)) continue;
                  const int64_t w0 = wo * stride - pad;
                  for (int64_t kw = 0; kw < KW; ++kw) {
                    const int64_t ww = w0 + kw;
                    if (ww < 0 || ww >= Wd) continue;
                    gxrow[ww] += gv * wrow[kw];
                    gwrow[kw] += gv * xrow[ww];
                  }
                }
              }
          }
        }
    };
    return self;
  }

  // k x k max pooling with stride k; ragged edges are dropped (floor).
  // Ties pick the first maximum in row-major scan order.
  Ref maxpool2d(Ref x, int k) {
    const Tensor<T>& X = value(x);
    if (X.ndim() != 4) throw DataError("maxpool2d: expected 4-d input");
    const int64_t N = X.dim(0), C = X.dim(1), H = X.dim(2), W = X.dim(3);
    const int64_t HO = H / k, WO = W / k;
    if (HO == 0 || WO == 0)
      throw DataError(strcat_msg("maxpool2d: window ", k, " larger than input ",
                                 shape_str(X.shape)));
    Tensor<T> out({N, C, HO, WO});
    for (int64_t n = 0; n < N; ++n)
      for (int64_t c = 0; c < C; ++c)
        for (int64_t ho = 0; ho < HO; ++ho)
          for (int64_t wo = 0; wo < WO; ++wo) {
            T best = X.at4(n, c, ho * k, wo * k);
            for (int64_t dh = 0; dh < k; ++dh)
              for (int64_t dw = 0; dw < k; ++dw)
                best = std::max(best, X.at4(n, c, ho * k + dh, wo * k + dw));
            out.at4(n, c, ho, wo) = best;
          }
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, self, k, N, C, HO, WO](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      const Tensor<T>& X2 = g.value(x);
      Tensor<T>& gx = g.grad_buffer(x);
      for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c)
          for (int64_t ho = 0; ho < HO; ++ho)
            for (int64_t wo = 0; wo < WO; ++wo) {
              int64_t bh = ho * k, bw = wo * k;
              T best = X2.at4(n, c, bh, bw);
              for (int64_t dh = 0; dh < k; ++dh)
                for (int64_t dw = 0; dw < k; ++dw) {
                  const T v = X2.at4(n, c, ho * k + dh, wo * k + dw);
                  if (v > best) {
                    best = v;
                    bh = ho * k + dh;
                    bw = wo * k + dw;
                  }
                }
              gx.at4(n, c, bh, bw) += go.at4(n, c, ho, wo);
            }
    };
    return self;
  }

  // Mean over the time axis of N x C x H x W, producing N x C x W.  Keeps the
  // encoder independent of utterance length.
  Ref temporal_mean(Ref x) {
    const Tensor<T>& X = value(x);
    if (X.ndim() != 4) throw DataError("temporal_mean: expected 4-d input");
    const int64_t N = X.dim(0), C = X.dim(1), H = X.dim(2), W = X.dim(3);
    Tensor<T> out({N, C, W});
    for (int64_t n = 0; n < N; ++n)
      for (int64_t c = 0; c < C; ++c)
        for (int64_t h = 0; h < H; ++h)
          for (int64_t w = 0; w < W; ++w)
            out.ptr()[(n * C + c) * W + w] += X.at4(n, c, h, w) / static_cast<T>(H);
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, self, N, C, H, W](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      Tensor<T>& gx = g.grad_buffer(x);
      for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c)
          for (int64_t h = 0; h < H; ++h)
            for (int64_t w = 0; w < W; ++w)
              gx.at4(n, c, h, w) += go.ptr()[(n * C + c) * W + w] / static_cast<T>(H);
    };
    return self;
  }

  // N x ... -> N x rest.
  Ref flatten(Ref x) {
    const Tensor<T>& X = value(x);
    const int64_t N = X.dim(0);
    const int64_t R = X.numel() / N;
    Tensor<T> out({N, R}, X.data);
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, self](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      Tensor<T>& gx = g.grad_buffer(x);
      for (int64_t i = 0; i < go.numel(); ++i) gx.ptr()[i] += go.ptr()[i];
    };
    return self;
  }

  // Concatenates N x Mi matrices along the column axis.
  Ref concat_cols(const std::vector<Ref>& parts) {
    if (parts.empty()) throw DataError("concat_cols: no inputs");
    const int64_t N = value(parts[0]).dim(0);
    int64_t M = 0;
    for (Ref p : parts) {
      if (value(p).ndim() != 2 || value(p).dim(0) != N)
        throw DataError("concat_cols: all inputs must be 2-d with equal row counts");
      M += value(p).dim(1);
    }
    Tensor<T> out({N, M});
    int64_t off = 0;
    for (Ref p : parts) {
      const Tensor<T>& P = value(p);
      const int64_t m = P.dim(1);
      for (int64_t n = 0; n < N; ++n)
        for (int64_t j = 0; j < m; ++j) out.ptr()[n * M + off + j] = P.ptr()[n * m + j];
      off += m;
    }
    Ref self = push(std::move(out), nullptr);
    std::vector<Ref> parts_copy = parts;
    nodes_[static_cast<size_t>(self.idx)].back = [parts_copy, self, N, M](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      int64_t off2 = 0;
      for (Ref p : parts_copy) {
        Tensor<T>& gp = g.grad_buffer(p);
        const int64_t m = gp.dim(1);
        for (int64_t n = 0; n < N; ++n)
          for (int64_t j = 0; j < m; ++j) gp.ptr()[n * m + j] += go.ptr()[n * M + off2 + j];
        off2 += m;
      }
    };
    return self;
  }

  // Selects rows of an N x D matrix; backward scatter-adds.
  Ref gather_rows(Ref x, std::vector<int64_t> rows) {
    const Tensor<T>& X = value(x);
    if (X.ndim() != 2) throw DataError("gather_rows: expected 2-d input");
    const int64_t D = X.dim(1);
    for (int64_t r : rows)
      if (r < 0 || r >= X.dim(0))
        throw DataError(strcat_msg("gather_rows: index ", r, " out of range [0,", X.dim(0), ")"));
    Tensor<T> out({static_cast<int64_t>(rows.size()), D});
    for (size_t i = 0; i < rows.size(); ++i)
      for (int64_t j = 0; j < D; ++j) out.ptr()[static_cast<int64_t>(i) * D + j] = X.ptr()[rows[i] * D + j];
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, self, rows = std::move(rows), D](Graph& g) {
      const Tensor<T>& go = g.grad(self);
      Tensor<T>& gx = g.grad_buffer(x);
      for (size_t i = 0; i < rows.size(); ++i)
        for (int64_t j = 0; j < D; ++j)
          gx.ptr()[rows[i] * D + j] += go.ptr()[static_cast<int64_t>(i) * D + j];
    };
    return self;
  }

  // Sum of all elements, as a scalar node.
  Ref sum(Ref x) {
    const Tensor<T>& X = value(x);
    Tensor<T> out({1});
    T s = 0;
    for (int64_t i = 0; i < X.numel(); ++i) s += X.ptr()[i];
    out.ptr()[0] = s;
    Ref self = push(std::move(out), nullptr);
    nodes_[static_cast<size_t>(self.idx)].back = [x, self](Graph& g) {
      const T gv = g.grad(self).ptr()[0];
      Tensor<T>& gx = g.grad_buffer(x);
      for (int64_t i = 0; i < gx.numel(); ++i) gx.ptr()[i] += gv;
    };
    return self;
  }

  // ---- backward ----

  // Seeds the (scalar) root gradient with 1, runs all closures in reverse
  // creation order, then flushes bound-parameter gradients into their
  // external accumulators.
  void backward(Ref root) {
    if (backward_done_) throw DataError("graph backward() called twice");
    backward_done_ = true;
    Node& rn = nodes_[static_cast<size_t>(root.idx)];
    if (rn.value.numel() != 1) throw DataError("backward: root must be a scalar node");
    for (int32_t i = 0; i <= root.idx; ++i) {
      Node& nd = nodes_[static_cast<size_t>(i)];
      nd.grad = Tensor<T>::zeros(nd.value.shape);
    }
    rn.grad.ptr()[0] = T(1);
    for (int32_t i = root.idx; i >= 0; --i) {
      Node& nd = nodes_[static_cast<size_t>(i)];
      if (nd.back) nd.back(*this);
    }
    for (int32_t i = 0; i <= root.idx; ++i) {
      Node& nd = nodes_[static_cast<size_t>(i)];
      if (nd.bound)
        for (int64_t j = 0; j < nd.grad.numel(); ++j)
          nd.bound->grad.ptr()[j] += nd.grad.ptr()[j];
    }
  }

  static T stable_sigmoid(T v) {
    if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
    const T e = std::exp(v);
    return e / (T(1) + e);
  }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    std::function<void(Graph&)> back;
    ParamTensor<T>* bound = nullptr;
  };

  Ref push(Tensor<T> v, std::function<void(Graph&)> back) {
    nodes_.push_back(Node{std::move(v), Tensor<T>(), std::move(back), nullptr});
    return Ref{static_cast<int32_t>(nodes_.size() - 1)};
  }

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace num
}  // namespace isv

#endif  // ISV_NUM_GRAPH_H_
