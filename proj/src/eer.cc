// src/eer.cc

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

#include "isv/trial/eer.h"

#include <algorithm>
#include <cmath>

namespace isv {
namespace trial {

EerPoint compute_eer(const std::vector<double>& target_scores,
                     const std::vector<double>& nontarget_scores) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw DataError(strcat_msg("compute_eer: insufficient trials (", target_scores.size(),
                               " target, ", nontarget_scores.size(), " non-target)"));
  for (double s : target_scores)
    if (!std::isfinite(s)) throw DataError("compute_eer: non-finite target score");
  for (double s : nontarget_scores)
    if (!std::isfinite(s)) throw DataError("compute_eer: non-finite non-target score");

  std::vector<double> tar = target_scores;
  std::vector<double> non = nontarget_scores;
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());

  std::vector<double> thresholds;
  thresholds.reserve(tar.size() + non.size() + 1);
  std::merge(tar.begin(), tar.end(), non.begin(), non.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  // Virtual final candidate above every score: FAR = 0, FRR = 1.
  thresholds.push_back(thresholds.back() + 1.0);

  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());
  auto far_at = [&](double thr) {
    const auto it = std::lower_bound(non.begin(), non.end(), thr);
    return static_cast<double>(non.end() - it) / nn;  // non-targets accepted (score >= thr)
  };
  auto frr_at = [&](double thr) {
    const auto it = std::lower_bound(tar.begin(), tar.end(), thr);
    return static_cast<double>(it - tar.begin()) / nt;  // targets rejected (score < thr)
  };

  double prev_far = far_at(thresholds[0]);
  double prev_frr = frr_at(thresholds[0]);
  double prev_thr = thresholds[0];
  double prev_d = prev_far - prev_frr;
  for (size_t k = 1; k < thresholds.size(); ++k) {
    const double far = far_at(thresholds[k]);
    const double frr = frr_at(thresholds[k]);
    const double d = far - frr;
    if (d <= 0.0) {
      const double t = prev_d / (prev_d - d);  // prev_d > 0 >= d, so t in (0, 1]
      const double eer = prev_frr + t * (frr - prev_frr);
      const double thr = prev_thr + t * (thresholds[k] - prev_thr);
      return {100.0 * eer, thr};
    }
    prev_far = far;
    prev_frr = frr;
    prev_thr = thresholds[k];
    prev_d = d;
  }
  // Unreachable: the virtual final candidate has FAR - FRR = -1.
  throw DataError("compute_eer: no sign change in FAR - FRR sweep");
}

EerPoint compute_eer(const ScoreSet& scores) {
  std::vector<double> tar, non;
  for (const auto& s : scores)
    (s.type == TrialType::kTarget ? tar : non).push_back(s.score);
  return compute_eer(tar, non);
}

EvalReport compute_three_eers(const ScoreSet& scores) {
  std::vector<double> tar, ze, rp;
  for (const auto& s : scores) {
    switch (s.type) {
      case TrialType::kTarget: tar.push_back(s.score); break;
      case TrialType::kZeroEffort: ze.push_back(s.score); break;
      case TrialType::kReplay: rp.push_back(s.score); break;
    }
  }
  if (tar.empty()) throw DataError("compute_three_eers: insufficient trials (no targets)");
  EvalReport rep;
  rep.n_target = static_cast<int64_t>(tar.size());
  rep.n_zero_effort = static_cast<int64_t>(ze.size());
  rep.n_replay = static_cast<int64_t>(rp.size());
  if (!ze.empty()) rep.ze = compute_eer(tar, ze);
  if (!rp.empty()) rep.pad = compute_eer(tar, rp);
  if (!ze.empty() || !rp.empty()) {
    std::vector<double> both = ze;
    both.insert(both.end(), rp.begin(), rp.end());
    rep.isv = compute_eer(tar, both);
  }
  return rep;
}

}  // namespace trial
}  // namespace isv
