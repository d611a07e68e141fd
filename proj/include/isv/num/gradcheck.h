// isv/num/gradcheck.h

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

#ifndef ISV_NUM_GRADCHECK_H_
#define ISV_NUM_GRADCHECK_H_

#include <cmath>
#include <functional>
#include <vector>

#include "isv/num/graph.h"
#include "isv/rng.h"

namespace isv {
namespace num {

struct GradCheckOptions {
  double epsilon = 1e-5;
  // At most this many elements are perturbed per parameter tensor; all of
  // them when the tensor is smaller.
  int max_samples_per_tensor = 24;
  uint64_t seed = 0x5eedc0de;
  // Central differences are only meaningful where the loss is smooth.  When a
  // sample disagrees with the analytic gradient, it is re-estimated at
  // epsilon/2; if the two finite-difference estimates disagree with each
  // other the loss is kinked inside the perturbation window (relu/mfm/maxpool
  // crossing a tie) and the sample is skipped instead of reported.
  bool skip_nonsmooth = true;
};

// Max over sampled parameter elements of
//   |analytic - central| / max(|analytic|, |central|, 1e-8).
// `forward` evaluates the loss at the current parameter values.  Analytic
// gradients must already be in each ParamTensor's grad buffer.  Requires
// 64-bit parameters; float gradients cannot be resolved against an O(eps^2)
// difference scheme.
inline double finite_diff_check(const std::vector<ParamTensor<double>*>& params,
                                const std::function<double()>& forward,
                                const GradCheckOptions& opt = {}) {
  Rng rng(opt.seed);
  double max_rel = 0.0;
  const double floor = 1e-8;
  for (ParamTensor<double>* p : params) {
    const int64_t n = p->value.numel();
    std::vector<int64_t> indices;
    if (n <= opt.max_samples_per_tensor) {
      for (int64_t i = 0; i < n; ++i) indices.push_back(i);
    } else {
      for (int i = 0; i < opt.max_samples_per_tensor; ++i)
        indices.push_back(static_cast<int64_t>(rng.uniform_int(static_cast<uint64_t>(n))));
    }
    for (int64_t i : indices) {
      const double analytic = p->grad.ptr()[i];
      const double central = [&](double eps) {
        const double saved = p->value.ptr()[i];
        p->value.ptr()[i] = saved + eps;
        const double fp = forward();
        p->value.ptr()[i] = saved - eps;
        const double fm = forward();
        p->value.ptr()[i] = saved;
        return (fp - fm) / (2.0 * eps);
      }(opt.epsilon);
      double rel = std::fabs(analytic - central) /
                   std::max({std::fabs(analytic), std::fabs(central), floor});
      if (rel > 1e-4 && opt.skip_nonsmooth) {
        const double saved = p->value.ptr()[i];
        const double eps2 = opt.epsilon / 2.0;
        p->value.ptr()[i] = saved + eps2;
        const double fp = forward();
        p->value.ptr()[i] = saved - eps2;
        const double fm = forward();
        p->value.ptr()[i] = saved;
        const double central2 = (fp - fm) / (2.0 * eps2);
        const double fd_disagreement = std::fabs(central2 - central) /
                                       std::max({std::fabs(central2), std::fabs(central), floor});
        if (fd_disagreement > 1e-3) continue;  // kink inside the window
        rel = std::fabs(analytic - central2) /
              std::max({std::fabs(analytic), std::fabs(central2), floor});
      }
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace num
}  // namespace isv

#endif  // ISV_NUM_GRADCHECK_H_
