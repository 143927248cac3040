/*
   Copyright 2026 The rlst Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#include "rlst/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "rlst/error.hpp"

namespace rlst {

namespace {

struct Cell {
    std::size_t row = 0;
    std::size_t col = 0;
};

/// Northwest corner start: exactly m + n - 1 basic cells, including any
/// degenerate zero-flow cells created by ties.
std::vector<char> northwest_corner(std::span<const double> supply,
                                   std::span<const double> demand,
                                   Tensor& flows) {
    const std::size_t m = supply.size();
    const std::size_t n = demand.size();
    std::vector<double> s(supply.begin(), supply.end());
    std::vector<double> d(demand.begin(), demand.end());
    std::vector<char> basic(m * n, 0);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < m && j < n) {
        const double f = std::min(s[i], d[j]);
        flows.at(i, j) = f;
        basic[i * n + j] = 1;
        s[i] -= f;
        d[j] -= f;
        // advance exactly one index per cell so the basis keeps m + n - 1
        // entries even when both residuals hit zero at once
        if (s[i] == 0.0 && i + 1 < m) {
            ++i;
        } else if (d[j] == 0.0 && j + 1 < n) {
            ++j;
        } else if (i + 1 < m) {
            ++i;
        } else {
            ++j;
        }
    }
    return basic;
}

/// Solves u_r + v_c = cost(r, c) over the basic cells with u_0 = 0 by
/// breadth-first traversal of the basis tree.
void compute_duals(const std::vector<char>& basic, const Tensor& cost,
                   std::size_t m, std::size_t n, std::vector<double>& u,
                   std::vector<double>& v) {
    std::vector<char> row_done(m, 0);
    std::vector<char> col_done(n, 0);
    u.assign(m, 0.0);
    v.assign(n, 0.0);
    row_done[0] = 1;
    std::deque<std::size_t> queue;
    queue.push_back(0);  // node ids: rows are 0..m-1, columns are m..m+n-1
    std::size_t visited = 1;
    while (!queue.empty()) {
        const std::size_t node = queue.front();
        queue.pop_front();
        if (node < m) {
            const std::size_t r = node;
            for (std::size_t c = 0; c < n; ++c) {
                if (basic[r * n + c] && !col_done[c]) {
                    v[c] = cost.at(r, c) - u[r];
                    col_done[c] = 1;
                    ++visited;
                    queue.push_back(m + c);
                }
            }
        } else {
            const std::size_t c = node - m;
            for (std::size_t r = 0; r < m; ++r) {
                if (basic[r * n + c] && !row_done[r]) {
                    u[r] = cost.at(r, c) - v[c];
                    row_done[r] = 1;
                    ++visited;
                    queue.push_back(r);
                }
            }
        }
    }
    if (visited != m + n) {
        throw NumericalError("transport: basis is not a spanning tree");
    }
}

/// Unique basis-tree path from row node er to column node ec, returned as the
/// sequence of basic cells along it. The entering cell (er, ec) closes this
/// path into the pivot cycle.
std::vector<Cell> tree_path(const std::vector<char>& basic, std::size_t m,
                            std::size_t n, std::size_t er, std::size_t ec) {
    const std::size_t total = m + n;
    const std::size_t start = er;
    const std::size_t goal = m + ec;
    std::vector<std::size_t> parent(total, total);
    std::vector<char> seen(total, 0);
    seen[start] = 1;
    std::deque<std::size_t> queue;
    queue.push_back(start);
    while (!queue.empty() && !seen[goal]) {
        const std::size_t node = queue.front();
        queue.pop_front();
        if (node < m) {
            const std::size_t r = node;
            for (std::size_t c = 0; c < n; ++c) {
                if (basic[r * n + c] && !seen[m + c]) {
                    seen[m + c] = 1;
                    parent[m + c] = node;
                    queue.push_back(m + c);
                }
            }
        } else {
            const std::size_t c = node - m;
            for (std::size_t r = 0; r < m; ++r) {
                if (basic[r * n + c] && !seen[r]) {
                    seen[r] = 1;
                    parent[r] = node;
                    queue.push_back(r);
                }
            }
        }
    }
    if (!seen[goal]) {
        throw NumericalError("transport: entering cell has no basis cycle");
    }
    std::vector<std::size_t> nodes;
    for (std::size_t node = goal; node != total; node = parent[node]) {
        nodes.push_back(node);
        if (node == start) break;
    }
    std::reverse(nodes.begin(), nodes.end());
    std::vector<Cell> path;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const std::size_t a = nodes[k];
        const std::size_t b = nodes[k + 1];
        if (a < m) {
            path.push_back(Cell{a, b - m});
        } else {
            path.push_back(Cell{b, a - m});
        }
    }
    return path;
}

}  // namespace

TransportPlan solve_transport(std::span<const double> supply,
                              std::span<const double> demand,
                              const Tensor& cost) {
    const std::size_t m = supply.size();
    const std::size_t n = demand.size();
    if (m == 0 || n == 0) {
        throw UsageError("transport: empty supply or demand");
    }
    if (cost.shape().size() != 2 || cost.shape()[0] != m ||
        cost.shape()[1] != n) {
        throw ConfigError("transport: cost shape must be supply x demand");
    }
    if (!cost.all_finite()) {
        throw NumericalError("transport: non-finite cost");
    }
    double supply_total = 0.0;
    for (const double s : supply) {
        if (!std::isfinite(s)) {
            throw NumericalError("transport: non-finite supply");
        }
        if (s <= 0.0) throw UsageError("transport: non-positive supply");
        supply_total += s;
    }
    double demand_total = 0.0;
    for (const double d : demand) {
        if (!std::isfinite(d)) {
            throw NumericalError("transport: non-finite demand");
        }
        if (d <= 0.0) throw UsageError("transport: non-positive demand");
        demand_total += d;
    }
    if (std::abs(supply_total - demand_total) > kBalanceTol) {
        throw UsageError("transport: supply and demand totals differ");
    }

    TransportPlan plan;
    plan.flows = Tensor({m, n});
    std::vector<char> basic = northwest_corner(supply, demand, plan.flows);

    std::vector<double> u;
    std::vector<double> v;
    const std::size_t max_iters = 1000 * (m + n) * (m + n) + 1000;
    for (std::size_t iter = 0;; ++iter) {
        if (iter >= max_iters) {
            throw NumericalError("transport: pivot iteration limit reached");
        }
        compute_duals(basic, cost, m, n, u, v);

        // Bland's rule: the first improving cell in row-major order enters
        bool found = false;
        std::size_t er = 0;
        std::size_t ec = 0;
        for (std::size_t r = 0; r < m && !found; ++r) {
            for (std::size_t c = 0; c < n && !found; ++c) {
                if (basic[r * n + c]) continue;
                if (cost.at(r, c) - u[r] - v[c] < -kReducedCostTol) {
                    er = r;
                    ec = c;
                    found = true;
                }
            }
        }
        if (!found) break;

        // cells at even path positions lose theta, odd positions gain it;
        // the lexicographically first minimizer leaves and is zeroed exactly
        const std::vector<Cell> path = tree_path(basic, m, n, er, ec);
        double theta = std::numeric_limits<double>::infinity();
        std::size_t lr = 0;
        std::size_t lc = 0;
        for (std::size_t k = 0; k < path.size(); k += 2) {
            const double f = plan.flows.at(path[k].row, path[k].col);
            const bool earlier = path[k].row * n + path[k].col < lr * n + lc;
            if (f < theta || (f == theta && earlier)) {
                theta = f;
                lr = path[k].row;
                lc = path[k].col;
            }
        }
        for (std::size_t k = 0; k < path.size(); ++k) {
            double& f = plan.flows.at(path[k].row, path[k].col);
            f += (k % 2 == 0) ? -theta : theta;
        }
        plan.flows.at(er, ec) = theta;
        plan.flows.at(lr, lc) = 0.0;
        basic[er * n + ec] = 1;
        basic[lr * n + lc] = 0;
    }

    plan.total_cost = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double f = plan.flows.at(r, c);
            if (f != 0.0) plan.total_cost += f * cost.at(r, c);
        }
    }
    return plan;
}

}  // namespace rlst
