// Copyright 2026 The UniInst Engine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

namespace uniinst {

/// Pairwise quality between every ground truth (row) and prediction
/// (column). Entries must be finite and within [0, 1]; either dimension
/// may be zero.
struct QualityMatrix {
  int num_gts = 0;
  int num_preds = 0;
  std::vector<double> q;  // row-major, num_gts * num_preds

  double at(int gt, int pred) const {
    return q[static_cast<std::size_t>(gt) * num_preds + pred];
  }
  double& at(int gt, int pred) {
    return q[static_cast<std::size_t>(gt) * num_preds + pred];
  }

  /// Throws InvalidMatrixError on non-finite or out-of-range entries.
  void validate() const;
};

struct AssignedPair {
  int gt_index = 0;
  int pred_index = 0;
  double quality = 0.0;
};

/// Injective map from ground truths to predictions. Pairs are sorted by
/// gt_index; unmatched_gts lists the ground truths left without a
/// prediction (only possible when there are more ground truths than
/// predictions, or after zero-quality demotion downstream).
struct Assignment {
  std::vector<AssignedPair> pairs;
  std::vector<int> unmatched_gts;

  double total_quality() const;
};

/// Maximizes total quality over injective gt -> pred maps. Exactly
/// min(G, N) pairs are produced. Among all maximizing assignments the one
/// whose (gt_index, pred_index) pair sequence is lexicographically
/// smallest is returned, so results are fully deterministic.
Assignment solve(const QualityMatrix& q);

/// Exhaustive reference solver with the identical tie rule. Guarded to
/// G <= 8 and N <= 10; larger inputs raise OracleTooLargeError.
Assignment solve_bruteforce(const QualityMatrix& q);

}  // namespace uniinst
