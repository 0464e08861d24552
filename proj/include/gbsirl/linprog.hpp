#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gbsirl {

// Dense primal simplex for  max 1'x  s.t.  A x <= b, x >= 0  with b >= 0,
// which is all the coherence-parameter computation needs. Bland's rule, so
// it cannot cycle.
struct SimplexResult {
  double objective = 0.0;
  std::vector<double> x;
};

inline SimplexResult simplex_max_sum(const std::vector<std::vector<double>>& a,
                                     const std::vector<double>& b) {
  const int m = static_cast<int>(a.size());
  const int n = m > 0 ? static_cast<int>(a[0].size()) : 0;
  constexpr double eps = 1e-11;

  // Tableau: columns [x(0..n-1) | slack(0..m-1) | rhs], last row = -objective.
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) throw std::invalid_argument("simplex_max_sum requires b >= 0");
    for (int j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][n + m] = b[i];
    basis[i] = n + i;
  }
  for (int j = 0; j < n; ++j) t[m][j] = -1.0;

  for (;;) {
    int pivot_col = -1;
    for (int j = 0; j < n + m; ++j)
      if (t[m][j] < -eps) {
        pivot_col = j;
        break;
      }
    if (pivot_col < 0) break;

    int pivot_row = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (t[i][pivot_col] > eps) {
        double ratio = t[i][n + m] / t[i][pivot_col];
        if (ratio < best_ratio - eps ||
            (ratio < best_ratio + eps && (pivot_row < 0 || basis[i] < basis[pivot_row]))) {
          best_ratio = ratio;
          pivot_row = i;
        }
      }
    }
    if (pivot_row < 0) throw std::runtime_error("simplex_max_sum: unbounded program");

    double pv = t[pivot_row][pivot_col];
    for (double& v : t[pivot_row]) v /= pv;
    for (int i = 0; i <= m; ++i) {
      if (i == pivot_row) continue;
      double f = t[i][pivot_col];
      if (f == 0.0) continue;
      for (int j = 0; j <= n + m; ++j) t[i][j] -= f * t[pivot_row][j];
    }
    basis[pivot_row] = pivot_col;
  }

  SimplexResult res;
  res.objective = t[m][n + m];
  res.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][n + m];
  return res;
}

// Value of the zero-sum matrix game  min over column distributions mu of
// max over rows h of sum_i payoff[h][i] mu_i.  Entries may be any reals;
// they are shifted positive internally.
struct GameSolution {
  double value = 0.0;
  std::vector<double> mu;
};

inline GameSolution min_max_game_value(const std::vector<std::vector<double>>& payoff) {
  const int rows = static_cast<int>(payoff.size());
  if (rows == 0) throw std::invalid_argument("empty payoff matrix");
  const int cols = static_cast<int>(payoff[0].size());

  double lo = payoff[0][0];
  for (const auto& r : payoff)
    for (double v : r) lo = std::min(lo, v);
  const double shift = 1.0 - lo;  // every shifted entry >= 1

  std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a[i][j] = payoff[i][j] + shift;

  SimplexResult lp = simplex_max_sum(a, std::vector<double>(rows, 1.0));
  if (lp.objective <= 0.0) throw std::runtime_error("game value solve failed");

  GameSolution sol;
  sol.value = 1.0 / lp.objective - shift;
  sol.mu.assign(cols, 0.0);
  for (int j = 0; j < cols; ++j) sol.mu[j] = lp.x[j] * sol.value + lp.x[j] * shift;
  // Normalize the recovered distribution; x scales as mu / game value.
  double sum = 0.0;
  for (double v : sol.mu) sum += v;
  if (sum > 0.0)
    for (double& v : sol.mu) v /= sum;
  return sol;
}

}  // namespace gbsirl
