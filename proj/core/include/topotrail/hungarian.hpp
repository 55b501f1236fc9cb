#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace topotrail {

// Minimum-cost perfect assignment on a dense n x n cost matrix (row-major).
// Returns the column assigned to every row. Shortest augmenting path
// Hungarian method with row/column potentials, O(n^3). Costs must be finite.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

}  // namespace topotrail
