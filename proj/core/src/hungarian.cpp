#include "topotrail/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topotrail/error.hpp"

namespace topotrail {

std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw ValidationError("assignment cost matrix must be n*n");
  for (double c : cost) {
    if (!std::isfinite(c)) throw ValidationError("assignment costs must be finite");
  }
  if (n == 0) return {};

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kFree = 0;
  // 1-based rows/columns; column 0 is the virtual start of each search.
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> row_of_col(n + 1, kFree), prev_col(n + 1, 0);
  std::vector<double> slack(n + 1);
  std::vector<bool> visited(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    row_of_col[0] = row;
    std::size_t col = 0;
    std::fill(slack.begin(), slack.end(), kInf);
    std::fill(visited.begin(), visited.end(), false);
    do {
      visited[col] = true;
      const std::size_t r = row_of_col[col];
      double delta = kInf;
      std::size_t next = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (visited[c]) continue;
        const double reduced = cost[(r - 1) * n + (c - 1)] - row_pot[r] - col_pot[c];
        if (reduced < slack[c]) {
          slack[c] = reduced;
          prev_col[c] = col;
        }
        if (slack[c] < delta) {
          delta = slack[c];
          next = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (visited[c]) {
          row_pot[row_of_col[c]] += delta;
          col_pot[c] -= delta;
        } else {
          slack[c] -= delta;
        }
      }
      col = next;
    } while (row_of_col[col] != kFree);
    // Flip the augmenting path back to the virtual column.
    do {
      const std::size_t p = prev_col[col];
      row_of_col[col] = row_of_col[p];
      col = p;
    } while (col != 0);
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t c = 1; c <= n; ++c) assignment[row_of_col[c] - 1] = c - 1;
  return assignment;
}

}  // namespace topotrail
