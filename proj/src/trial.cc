// src/trial.cc

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

#include "isv/trial/trial.h"

namespace isv {
namespace trial {

const char* trial_type_name(TrialType t) {
  switch (t) {
    case TrialType::kTarget: return "target";
    case TrialType::kZeroEffort: return "zero_effort";
    case TrialType::kReplay: return "replay";
  }
  return "?";
}

TrialType trial_type_from(const std::string& token) {
  if (token == "target") return TrialType::kTarget;
  if (token == "zero_effort") return TrialType::kZeroEffort;
  if (token == "replay") return TrialType::kReplay;
  throw DataError(strcat_msg("unknown trial type token '", token, "'"));
}

std::vector<InBatchTrial> compose_inbatch_trials(const std::vector<BatchItem>& batch,
                                                 bool ordered) {
  if (batch.size() < 2)
    throw DataError(strcat_msg("compose_inbatch_trials: batch of ", batch.size(),
                               " cannot form a trial"));
  bool any_bonafide = false;
  for (const auto& it : batch) any_bonafide |= it.bonafide;
  if (!any_bonafide)
    throw DataError("compose_inbatch_trials: batch contains no bona-fide utterance");

  std::vector<InBatchTrial> out;
  const size_t n = batch.size();
  auto classify = [](const BatchItem& e, const BatchItem& t) -> int {
    // -1: not a valid trial
    if (!e.bonafide) return -1;
    const bool same = e.speaker == t.speaker;
    if (same && t.bonafide) return static_cast<int>(TrialType::kTarget);
    if (same && !t.bonafide) return static_cast<int>(TrialType::kReplay);
    if (!same && t.bonafide) return static_cast<int>(TrialType::kZeroEffort);
    return -1;  // different speaker, replayed test: outside the protocol
  };

  if (ordered) {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const int k = classify(batch[i], batch[j]);
        if (k >= 0)
          out.push_back({batch[i].index, batch[j].index, static_cast<TrialType>(k)});
      }
  } else {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        // the bona-fide side enrolls; both bona-fide: the earlier row enrolls
        const BatchItem* e = &batch[i];
        const BatchItem* t = &batch[j];
        if (!e->bonafide && t->bonafide) std::swap(e, t);
        const int k = classify(*e, *t);
        if (k >= 0) out.push_back({e->index, t->index, static_cast<TrialType>(k)});
      }
  }
  if (out.empty())
    throw DataError("compose_inbatch_trials: no composable pairs in batch");
  return out;
}

}  // namespace trial
}  // namespace isv
