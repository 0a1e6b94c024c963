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

#include "uniinst/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "uniinst/errors.hpp"

namespace uniinst {

namespace {

// Two totals closer than this are treated as a tie and resolved
// lexicographically. Well above accumulated rounding noise, well below any
// meaningful quality gap.
constexpr double kTieEps = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path solver for the rectangular min-cost assignment
// with `rows <= cols` and every row matched. Maintains dual potentials
// (u over rows, v over cols) with non-negative reduced costs; v stays
// non-positive and only matched columns ever leave zero.
struct DualSolver {
  int rows = 0;
  int cols = 0;
  std::vector<double> cost;  // row-major
  std::vector<double> u, v;
  std::vector<int> col_of;  // per row
  std::vector<int> row_of;  // per col, -1 if unmatched

  double at(int r, int c) const {
    return cost[static_cast<std::size_t>(r) * cols + c];
  }

  void run() {
    u.assign(rows, 0.0);
    v.assign(cols, 0.0);
    col_of.assign(rows, -1);
    row_of.assign(cols, -1);
    std::vector<double> dist(cols);
    std::vector<int> prev(cols);
    std::vector<char> done(cols);
    for (int root = 0; root < rows; ++root) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(prev.begin(), prev.end(), -1);
      std::fill(done.begin(), done.end(), 0);
      int cur_row = root;
      int via = -1;  // column through which cur_row was reached
      double len = 0.0;
      int sink = -1;
      while (sink < 0) {
        for (int j = 0; j < cols; ++j) {
          if (done[j]) continue;
          const double nd = len + at(cur_row, j) - u[cur_row] - v[j];
          if (nd < dist[j]) {
            dist[j] = nd;
            prev[j] = via;
          }
        }
        int jmin = -1;
        double dmin = kInf;
        for (int j = 0; j < cols; ++j) {
          if (!done[j] && dist[j] < dmin) {
            dmin = dist[j];
            jmin = j;
          }
        }
        done[jmin] = 1;
        len = dmin;
        if (row_of[jmin] < 0) {
          sink = jmin;
        } else {
          cur_row = row_of[jmin];
          via = jmin;
        }
      }
      u[root] += len;
      for (int j = 0; j < cols; ++j) {
        if (!done[j] || j == sink) continue;
        u[row_of[j]] += len - dist[j];
        v[j] -= len - dist[j];
      }
      // Flip the augmenting path back from the sink.
      int j = sink;
      while (j >= 0) {
        const int pj = prev[j];
        const int r = (pj < 0) ? root : row_of[pj];
        row_of[j] = r;
        col_of[r] = j;
        j = pj;
      }
    }
  }
};

// Canonicalizes an optimal matching to the lexicographically smallest
// optimal one. Works on the graph of tight edges (zero reduced cost): by
// complementary slackness a matching that keeps every row matched and
// every column with a strictly negative potential matched is optimal, and
// conversely every optimal matching lives inside this graph.
struct LexCanonicalizer {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<int>> row_adj;  // tight columns per row, ascending
  std::vector<std::vector<int>> col_adj;  // tight rows per column, ascending
  std::vector<char> strict_col;           // potential < 0: must stay matched
  std::vector<int> col_of;                // live certificate matching
  std::vector<int> row_of;
  std::vector<char> fixed_row;
  std::vector<char> fixed_col;
  std::vector<char> visited_col;
  std::vector<char> visited_row;

  void init(const DualSolver& s) {
    rows = s.rows;
    cols = s.cols;
    row_adj.assign(rows, {});
    col_adj.assign(cols, {});
    strict_col.assign(cols, 0);
    for (int j = 0; j < cols; ++j) {
      strict_col[j] = s.v[j] < -kTieEps ? 1 : 0;
    }
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j < cols; ++j) {
        if (s.at(r, j) - s.u[r] - s.v[j] <= kTieEps) {
          row_adj[r].push_back(j);
          col_adj[j].push_back(r);
        }
      }
    }
    col_of = s.col_of;
    row_of = s.row_of;
    fixed_row.assign(rows, 0);
    fixed_col.assign(cols, 0);
  }

  // Kuhn augmentation: rematch free row r to some free column.
  bool augment_row(int r) {
    for (int j : row_adj[r]) {
      if (fixed_col[j] || visited_col[j]) continue;
      visited_col[j] = 1;
      if (row_of[j] < 0 || augment_row(row_of[j])) {
        row_of[j] = r;
        col_of[r] = j;
        return true;
      }
    }
    return false;
  }

  // Rematches column s while keeping every row matched; succeeds by
  // releasing some non-strict column at the end of an alternating path.
  bool saturate_col(int s) {
    for (int r : col_adj[s]) {
      if (fixed_row[r] || visited_row[r]) continue;
      visited_row[r] = 1;
      const int c = col_of[r];
      if (!strict_col[c]) {
        row_of[c] = -1;
        col_of[r] = s;
        row_of[s] = r;
        return true;
      }
      if (saturate_col(c)) {
        col_of[r] = s;
        row_of[s] = r;
        return true;
      }
    }
    return false;
  }

  // Attempts to re-route the certificate so that row r is matched to
  // column j. Restores the previous matching on failure.
  bool try_fix(int r, int j) {
    if (col_of[r] == j) return true;
    const auto saved_col_of = col_of;
    const auto saved_row_of = row_of;
    const int released_col = col_of[r];
    const int displaced_row = row_of[j];
    col_of[r] = j;
    row_of[j] = r;
    if (released_col >= 0) row_of[released_col] = -1;
    bool ok = true;
    if (displaced_row >= 0 && displaced_row != r) {
      col_of[displaced_row] = -1;
      visited_col.assign(cols, 0);
      visited_col[j] = 1;
      ok = augment_row(displaced_row);
    }
    if (ok && released_col >= 0 && strict_col[released_col] &&
        row_of[released_col] < 0) {
      visited_row.assign(rows, 0);
      visited_row[r] = 1;  // the fixed pair must stay untouched
      ok = saturate_col(released_col);
    }
    if (!ok) {
      col_of = saved_col_of;
      row_of = saved_row_of;
      return false;
    }
    return true;
  }

  // Attempts to leave column g unmatched. Only legal when no optimal
  // matching needs it.
  bool try_unmatch_col(int g) {
    if (strict_col[g]) return false;
    const int r = row_of[g];
    if (r < 0) return true;
    const auto saved_col_of = col_of;
    const auto saved_row_of = row_of;
    row_of[g] = -1;
    col_of[r] = -1;
    visited_col.assign(cols, 0);
    visited_col[g] = 1;
    if (!augment_row(r)) {
      col_of = saved_col_of;
      row_of = saved_row_of;
      return false;
    }
    return true;
  }
};

void lex_pass_rows_are_gts(LexCanonicalizer& lex) {
  for (int g = 0; g < lex.rows; ++g) {
    bool placed = false;
    for (int j : lex.row_adj[g]) {
      if (lex.fixed_col[j]) continue;
      if (lex.try_fix(g, j)) {
        lex.fixed_row[g] = 1;
        lex.fixed_col[j] = 1;
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw std::logic_error("assignment solver lost its certificate");
    }
  }
}

void lex_pass_cols_are_gts(LexCanonicalizer& lex) {
  for (int g = 0; g < lex.cols; ++g) {
    bool placed = false;
    for (int r : lex.col_adj[g]) {
      if (lex.fixed_row[r]) continue;
      if (lex.try_fix(r, g)) {
        lex.fixed_row[r] = 1;
        lex.fixed_col[g] = 1;
        placed = true;
        break;
      }
    }
    if (!placed) {
      if (!lex.try_unmatch_col(g)) {
        throw std::logic_error("assignment solver lost its certificate");
      }
      lex.fixed_col[g] = 1;
    }
  }
}

Assignment finish(const QualityMatrix& q, const std::vector<int>& pred_of_gt) {
  Assignment out;
  for (int g = 0; g < q.num_gts; ++g) {
    if (pred_of_gt[g] >= 0) {
      out.pairs.push_back({g, pred_of_gt[g], q.at(g, pred_of_gt[g])});
    } else {
      out.unmatched_gts.push_back(g);
    }
  }
  return out;
}

}  // namespace

void QualityMatrix::validate() const {
  if (num_gts < 0 || num_preds < 0 ||
      q.size() != static_cast<std::size_t>(num_gts) * num_preds) {
    throw InvalidMatrixError("quality matrix storage does not match shape");
  }
  for (double x : q) {
    if (!std::isfinite(x)) {
      throw InvalidMatrixError("quality matrix has a non-finite entry");
    }
    if (x < 0.0 || x > 1.0) {
      throw InvalidMatrixError("quality entry outside [0,1]: " +
                               std::to_string(x));
    }
  }
}

double Assignment::total_quality() const {
  double total = 0.0;
  for (const auto& p : pairs) total += p.quality;
  return total;
}

Assignment solve(const QualityMatrix& q) {
  q.validate();
  const int G = q.num_gts;
  const int N = q.num_preds;
  if (G == 0) return {};
  if (N == 0) {
    Assignment out;
    for (int g = 0; g < G; ++g) out.unmatched_gts.push_back(g);
    return out;
  }

  // The dual solver wants the smaller side as rows; every row ends up
  // matched, which is exactly the min(G, N)-pair contract.
  const bool gts_are_rows = G <= N;
  DualSolver solver;
  solver.rows = gts_are_rows ? G : N;
  solver.cols = gts_are_rows ? N : G;
  solver.cost.resize(static_cast<std::size_t>(solver.rows) * solver.cols);
  for (int r = 0; r < solver.rows; ++r) {
    for (int c = 0; c < solver.cols; ++c) {
      const double quality = gts_are_rows ? q.at(r, c) : q.at(c, r);
      solver.cost[static_cast<std::size_t>(r) * solver.cols + c] =
          1.0 - quality;
    }
  }
  solver.run();

  LexCanonicalizer lex;
  lex.init(solver);
  std::vector<int> pred_of_gt(G, -1);
  if (gts_are_rows) {
    lex_pass_rows_are_gts(lex);
    for (int g = 0; g < G; ++g) pred_of_gt[g] = lex.col_of[g];
  } else {
    lex_pass_cols_are_gts(lex);
    for (int g = 0; g < G; ++g) pred_of_gt[g] = lex.row_of[g];
  }
  return finish(q, pred_of_gt);
}

Assignment solve_bruteforce(const QualityMatrix& q) {
  q.validate();
  const int G = q.num_gts;
  const int N = q.num_preds;
  if (G > 8 || N > 10) {
    throw OracleTooLargeError("brute-force oracle supports at most 8 ground "
                              "truths and 10 predictions");
  }
  const int to_match = std::min(G, N);
  std::vector<int> current(G, -1);
  std::vector<int> best;
  double best_total = -kInf;

  // Depth-first over gt indices; candidate predictions ascending, the
  // unmatched option last. The first maximum found is therefore the
  // lexicographically smallest pair sequence.
  auto recurse = [&](auto&& self, int g, std::uint32_t used, int matched,
                     double total) -> void {
    if (g == G) {
      if (matched == to_match && total > best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    for (int p = 0; p < N; ++p) {
      if (used & (1u << p)) continue;
      current[g] = p;
      self(self, g + 1, used | (1u << p), matched + 1, total + q.at(g, p));
    }
    if (G - (g + 1) >= to_match - matched) {
      current[g] = -1;
      self(self, g + 1, used, matched, total);
    }
  };
  recurse(recurse, 0, 0u, 0, 0.0);
  return finish(q, best);
}

}  // namespace uniinst
