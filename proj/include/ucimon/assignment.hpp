#ifndef UCIMON_ASSIGNMENT_HPP
#define UCIMON_ASSIGNMENT_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ucimon {

/// Row-major rectangular cost matrix; +infinity marks a forbidden pair.
struct CostMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> cost;

    CostMatrix(std::size_t r, std::size_t c);
    double& operator()(std::size_t r, std::size_t c) { return cost[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return cost[r * cols + c]; }
};

struct AssignmentResult {
    std::vector<std::optional<std::size_t>> row_to_col;
    std::size_t matched = 0;
    double total_cost = 0.0;  // summed over matched rows in row order
};

/// Gated linear assignment: among all one-to-one pairings that use only
/// finite entries, picks one with the largest number of pairs and, among
/// those, the smallest total cost. Successive shortest augmenting paths with
/// Dijkstra on reduced costs (Jonker-Volgenant style potentials). Costs must
/// be non-negative. Ties resolve toward lower row, then lower column, indices.
AssignmentResult solve_assignment(const CostMatrix& m);

}  // namespace ucimon

#endif  // UCIMON_ASSIGNMENT_HPP
