#include "ucimon/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ucimon/errors.hpp"

namespace ucimon {

CostMatrix::CostMatrix(std::size_t r, std::size_t c)
    : rows(r), cols(c), cost(r * c, std::numeric_limits<double>::infinity()) {}

AssignmentResult solve_assignment(const CostMatrix& m) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    const std::size_t R = m.rows, C = m.cols;
    for (double c : m.cost)
        if (c < 0.0 || std::isnan(c)) throw InputError("assignment costs must be non-negative");

    std::vector<std::size_t> row_match(R, kNone), col_match(C, kNone);
    std::vector<double> pot_row(R, 0.0), pot_col(C, 0.0);
    std::vector<double> dist_row(R), dist_col(C);
    std::vector<std::size_t> prev_col(C);  // row that reached the column
    std::vector<char> done_row(R), done_col(C);

    for (;;) {
        std::fill(dist_col.begin(), dist_col.end(), kInf);
        std::fill(done_row.begin(), done_row.end(), 0);
        std::fill(done_col.begin(), done_col.end(), 0);
        for (std::size_t r = 0; r < R; ++r) dist_row[r] = row_match[r] == kNone ? 0.0 : kInf;

        std::size_t target = kNone;
        for (;;) {
            // smallest tentative distance; rows before columns, lower index first
            double best = kInf;
            std::size_t best_node = kNone;
            bool best_is_row = false;
            for (std::size_t r = 0; r < R; ++r)
                if (!done_row[r] && dist_row[r] < best) {
                    best = dist_row[r];
                    best_node = r;
                    best_is_row = true;
                }
            for (std::size_t c = 0; c < C; ++c)
                if (!done_col[c] && dist_col[c] < best) {
                    best = dist_col[c];
                    best_node = c;
                    best_is_row = false;
                }
            if (best_node == kNone) break;

            if (best_is_row) {
                const std::size_t r = best_node;
                done_row[r] = 1;
                for (std::size_t c = 0; c < C; ++c) {
                    if (done_col[c] || c == row_match[r]) continue;
                    const double w = m(r, c);
                    if (w == kInf) continue;
                    const double reduced = std::max(0.0, w + pot_row[r] - pot_col[c]);
                    if (dist_row[r] + reduced < dist_col[c]) {
                        dist_col[c] = dist_row[r] + reduced;
                        prev_col[c] = r;
                    }
                }
            } else {
                const std::size_t c = best_node;
                done_col[c] = 1;
                if (col_match[c] == kNone) {
                    target = c;
                    break;
                }
                const std::size_t r = col_match[c];
                // matched edges have zero reduced cost
                if (!done_row[r] && dist_col[c] < dist_row[r]) dist_row[r] = dist_col[c];
            }
        }
        if (target == kNone) break;

        const double reach = dist_col[target];
        for (std::size_t r = 0; r < R; ++r) pot_row[r] += std::min(dist_row[r], reach);
        for (std::size_t c = 0; c < C; ++c) pot_col[c] += std::min(dist_col[c], reach);

        for (std::size_t c = target;;) {
            const std::size_t r = prev_col[c];
            const std::size_t next = row_match[r];
            row_match[r] = c;
            col_match[c] = r;
            if (next == kNone) break;
            c = next;
        }
    }

    AssignmentResult res;
    res.row_to_col.resize(R);
    for (std::size_t r = 0; r < R; ++r) {
        if (row_match[r] == kNone) continue;
        res.row_to_col[r] = row_match[r];
        ++res.matched;
        res.total_cost += m(r, row_match[r]);
    }
    return res;
}

}  // namespace ucimon
