#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "ssat/error.hpp"

namespace ssat {

enum class Solver { Hungarian, Greedy };

inline std::string_view to_string(Solver s) {
  return s == Solver::Hungarian ? "hungarian" : "greedy";
}

/// Dense row-major cost matrix with a per-cell feasibility mask. Rows are
/// tracks, columns are detections.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cost_(rows * cols, 0.0),
        feasible_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double cost(std::size_t r, std::size_t c) const { return cost_[r * cols_ + c]; }
  bool feasible(std::size_t r, std::size_t c) const {
    return feasible_[r * cols_ + c] != 0;
  }

  void set(std::size_t r, std::size_t c, double cost, bool feasible) {
    if (!std::isfinite(cost) || cost < 0.0) {
      throw InvariantError("CostMatrix: costs must be finite and non-negative");
    }
    cost_[r * cols_ + c] = cost;
    feasible_[r * cols_ + c] = feasible ? 1 : 0;
  }

  /// Marks feasible exactly the cells with cost <= threshold.
  void gate(double threshold) {
    for (std::size_t i = 0; i < cost_.size(); ++i) {
      feasible_[i] = cost_[i] <= threshold ? 1 : 0;
    }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cost_;
  std::vector<char> feasible_;
};

using Pairing = std::vector<std::pair<std::size_t, std::size_t>>;

namespace detail {

// Shortest augmenting path Kuhn-Munkres with potentials, O(n^2 m), n <= m.
// `cost` is row-major n x m. Returns the column assigned to each row.
inline std::vector<std::size_t> hungarian_rows_le_cols(
    const std::vector<double>& cost, std::size_t n, std::size_t m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = 0;
  // 1-based internally; column 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> row_of(m + 1, none), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != none);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_of_row(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (row_of[j] != none) col_of_row[row_of[j] - 1] = j - 1;
  }
  return col_of_row;
}

}  // namespace detail

/// Minimum-cost assignment on a dense rectangular matrix where every cell is
/// allowed. Every row (or every column, whichever side is smaller) is
/// assigned. Returns (row, col) pairs sorted by row.
inline Pairing hungarian_dense(const std::vector<double>& cost, std::size_t rows,
                               std::size_t cols) {
  Pairing out;
  if (rows == 0 || cols == 0) return out;
  if (rows <= cols) {
    const auto assigned = detail::hungarian_rows_le_cols(cost, rows, cols);
    for (std::size_t r = 0; r < rows; ++r) out.emplace_back(r, assigned[r]);
  } else {
    std::vector<double> t(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = cost[r * cols + c];
    const auto assigned = detail::hungarian_rows_le_cols(t, cols, rows);
    for (std::size_t c = 0; c < cols; ++c) out.emplace_back(assigned[c], c);
    std::sort(out.begin(), out.end());
  }
  return out;
}

/// Gated Hungarian: maximizes the number of pairs drawn from feasible cells,
/// then minimizes their total cost. Infeasible cells are priced above the
/// sum of every feasible cost so that trading one feasible pair for any
/// cheaper combination is never profitable.
inline Pairing solve_hungarian(const CostMatrix& m) {
  Pairing out;
  const std::size_t rows = m.rows(), cols = m.cols();
  if (rows == 0 || cols == 0) return out;
  double max_feasible = 0.0;
  bool any = false;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (m.feasible(r, c)) {
        any = true;
        max_feasible = std::max(max_feasible, m.cost(r, c));
      }
  if (!any) return out;
  const double big =
      (max_feasible + 1.0) * static_cast<double>(std::min(rows, cols) + 1);
  std::vector<double> dense(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      dense[r * cols + c] = m.feasible(r, c) ? m.cost(r, c) : big;
  for (const auto& [r, c] : hungarian_dense(dense, rows, cols)) {
    if (m.feasible(r, c)) out.emplace_back(r, c);
  }
  return out;
}

/// Greedy: feasible cells in ascending (cost, row, col) order, taking a cell
/// whenever both its row and column are still free.
inline Pairing solve_greedy(const CostMatrix& m) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> cells;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.feasible(r, c)) cells.emplace_back(m.cost(r, c), r, c);
  std::sort(cells.begin(), cells.end());
  std::vector<char> row_used(m.rows(), 0), col_used(m.cols(), 0);
  Pairing out;
  for (const auto& [cost, r, c] : cells) {
    if (row_used[r] || col_used[c]) continue;
    row_used[r] = col_used[c] = 1;
    out.emplace_back(r, c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Pairing solve_assignment(const CostMatrix& m, Solver solver = Solver::Hungarian) {
  return solver == Solver::Hungarian ? solve_hungarian(m) : solve_greedy(m);
}

inline double total_cost(const CostMatrix& m, const Pairing& p) {
  double s = 0.0;
  for (const auto& [r, c] : p) s += m.cost(r, c);
  return s;
}

}  // namespace ssat
