// isv/model/scorer.h

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

#ifndef ISV_MODEL_SCORER_H_
#define ISV_MODEL_SCORER_H_

#include <cmath>
#include <vector>

#include "isv/common.h"

namespace isv {
namespace model {

// Baseline SV scorer: cosine similarity of two embeddings.
template <typename T>
double cosine_score(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size())
    throw DataError(strcat_msg("cosine_score: dims differ (", a.size(), " vs ", b.size(), ")"));
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0)
    throw DataError("cosine_score: undefined for a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace model
}  // namespace isv

#endif  // ISV_MODEL_SCORER_H_
