// isv/trial/eer.h

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

#ifndef ISV_TRIAL_EER_H_
#define ISV_TRIAL_EER_H_

#include <optional>
#include <vector>

#include "isv/trial/trial.h"

namespace isv {
namespace trial {

struct EerPoint {
  double eer_percent;
  double threshold;
};

// Equal error rate with the tie/interpolation policy used throughout:
//   * a trial is accepted iff score >= threshold (ties accept);
//   * candidate thresholds are the distinct scores in increasing order, plus
//     a virtual final point (max score + 1) where FAR = 0 and FRR = 1;
//   * FAR - FRR is non-increasing along the sweep and equals 1 at the first
//     candidate; the EER is read off by linear interpolation between the two
//     adjacent candidates where FAR - FRR changes sign.
// The result depends only on the order statistics, so any strictly
// increasing transform of the scores leaves it unchanged.
EerPoint compute_eer(const std::vector<double>& target_scores,
                     const std::vector<double>& nontarget_scores);

// Same, with targets and every other type in the set treated as non-target.
EerPoint compute_eer(const ScoreSet& scores);

struct EvalReport {
  std::optional<EerPoint> ze;   // targets vs zero-effort non-targets
  std::optional<EerPoint> pad;  // targets vs replay non-targets
  std::optional<EerPoint> isv;  // targets vs both non-target types
  int64_t n_target = 0;
  int64_t n_zero_effort = 0;
  int64_t n_replay = 0;
};

// The three EERs, each computed on exactly its trial-type subset.  A missing
// non-target type leaves its entry absent; missing targets are an error.
EvalReport compute_three_eers(const ScoreSet& scores);

}  // namespace trial
}  // namespace isv

#endif  // ISV_TRIAL_EER_H_
