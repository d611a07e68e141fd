// isv/trial/trial.h

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

#ifndef ISV_TRIAL_TRIAL_H_
#define ISV_TRIAL_TRIAL_H_

#include <string>
#include <vector>

#include "isv/common.h"

namespace isv {
namespace trial {

// target:      same speaker, bona-fide test
// zero_effort: different speakers, bona-fide test
// replay:      same speaker, replayed test
// The enrollment side is always bona-fide.
enum class TrialType { kTarget, kZeroEffort, kReplay };

const char* trial_type_name(TrialType t);
TrialType trial_type_from(const std::string& token);

struct Trial {
  std::string enroll_id;
  std::string test_id;
  TrialType type;
};

// One scored trial; the input to every EER computation.
struct ScoredTrial {
  double score;
  TrialType type;
  std::string id;  // optional stable identifier used for deterministic sorting
};

using ScoreSet = std::vector<ScoredTrial>;

// Labels of one utterance inside a batch, for in-batch trial composition.
struct BatchItem {
  int index;            // row in the embedding matrix
  std::string speaker;
  bool bonafide;
};

// A composed in-batch trial by batch row.
struct InBatchTrial {
  int enroll;
  int test;
  TrialType type;
};

// Composes trials over a labeled batch.  Enrollment must be bona-fide;
// different-speaker pairs with a replayed test belong to none of the three
// trial types and are excluded.  With ordered=true all ordered pairs (i, j),
// i != j are considered; with ordered=false each unordered pair yields at
// most one trial (the bona-fide side enrolls; for bona-fide/bona-fide pairs
// the earlier batch row enrolls).
std::vector<InBatchTrial> compose_inbatch_trials(const std::vector<BatchItem>& batch,
                                                 bool ordered = true);

}  // namespace trial
}  // namespace isv

#endif  // ISV_TRIAL_TRIAL_H_
