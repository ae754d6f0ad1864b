#pragma once

#include <algorithm>
#include <limits>
#include <vector>

namespace exgraph {

struct Assignment {
  // row_to_col[i] is the matched column of row i, or -1.
  std::vector<int> row_to_col;
  double total = 0.0;
};

// Maximum-weight bipartite matching on a rows x cols matrix of non-negative
// weights (Kuhn-Munkres with potentials, O(n^3) on the padded square matrix).
// Rows left unmatched or paired with a padding column get -1.
inline Assignment max_weight_matching(const std::vector<std::vector<double>>& weight) {
  const int rows = static_cast<int>(weight.size());
  const int cols = rows ? static_cast<int>(weight[0].size()) : 0;
  Assignment result;
  result.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return result;

  const int n = std::max(rows, cols);
  double top = 0.0;
  for (const auto& r : weight)
    for (double w : r) top = std::max(top, w);
  auto cost = [&](int i, int j) {
    const double w = (i < rows && j < cols) ? weight[i][j] : 0.0;
    return top - w;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  for (int j = 1; j <= n; ++j) {
    const int i = p[j] - 1;
    if (i < rows && j - 1 < cols) {
      result.row_to_col[i] = j - 1;
      result.total += weight[i][j - 1];
    }
  }
  return result;
}

}  // namespace exgraph
