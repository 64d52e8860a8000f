#include "topsim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "topsim/errors.hpp"

namespace topsim {

namespace {

struct BasicCell {
    int i = 0, j = 0;
    double x = 0.0;
};

// Dual variables from the current spanning tree: u[src], v[sink]; every basic
// arc satisfies c = u + v exactly by construction.
void compute_duals(const std::vector<BasicCell>& basis, int m, int n,
                   const Eigen::MatrixXd& cost, std::vector<double>& u,
                   std::vector<double>& v) {
    std::vector<std::vector<int>> adj(m + n);
    for (std::size_t b = 0; b < basis.size(); ++b) {
        adj[basis[b].i].push_back(static_cast<int>(b));
        adj[m + basis[b].j].push_back(static_cast<int>(b));
    }
    std::vector<char> seen(m + n, 0);
    u.assign(m, 0.0);
    v.assign(n, 0.0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
        int node = q.front();
        q.pop();
        for (int b : adj[node]) {
            int other = node < m ? m + basis[b].j : basis[b].i;
            if (seen[other]) continue;
            if (other >= m)
                v[basis[b].j] = cost(basis[b].i, basis[b].j) - u[basis[b].i];
            else
                u[basis[b].i] = cost(basis[b].i, basis[b].j) - v[basis[b].j];
            seen[other] = 1;
            q.push(other);
        }
    }
    for (char s : seen)
        if (!s) throw ConsistencyError("solve_transport: basis tree disconnected");
}

// Tree path between two nodes as a sequence of basis-arc indices.
std::vector<int> tree_path(const std::vector<BasicCell>& basis, int m, int n,
                           int from, int to) {
    std::vector<std::vector<int>> adj(m + n);
    for (std::size_t b = 0; b < basis.size(); ++b) {
        adj[basis[b].i].push_back(static_cast<int>(b));
        adj[m + basis[b].j].push_back(static_cast<int>(b));
    }
    std::vector<int> parent_arc(m + n, -1), parent_node(m + n, -1);
    std::vector<char> seen(m + n, 0);
    std::queue<int> q;
    q.push(from);
    seen[from] = 1;
    while (!q.empty()) {
        int node = q.front();
        q.pop();
        if (node == to) break;
        for (int b : adj[node]) {
            int other = node < m ? m + basis[b].j : basis[b].i;
            if (seen[other]) continue;
            seen[other] = 1;
            parent_arc[other] = b;
            parent_node[other] = node;
            q.push(other);
        }
    }
    if (!seen[to]) throw ConsistencyError("solve_transport: basis tree broken");
    std::vector<int> path;
    for (int node = to; node != from; node = parent_node[node])
        path.push_back(parent_arc[node]);
    return path;  // ordered from `to` back to `from`
}

}  // namespace

TransportPlan solve_transport(const std::vector<double>& supply,
                              const std::vector<double>& demand,
                              const Eigen::MatrixXd& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    if (m == 0 || n == 0)
        throw ConfigError("solve_transport: empty supply or demand");
    if (cost.rows() != m || cost.cols() != n)
        throw ConfigError("solve_transport: cost shape mismatch");
    double ta = 0, tb = 0;
    for (double a : supply) {
        if (!(a > 0) || !std::isfinite(a))
            throw ConfigError("solve_transport: supplies must be positive");
        ta += a;
    }
    for (double b : demand) {
        if (!(b > 0) || !std::isfinite(b))
            throw ConfigError("solve_transport: demands must be positive");
        tb += b;
    }
    if (std::fabs(ta - tb) > 1e-9)
        throw ConfigError("solve_transport: unbalanced totals");
    double cmax = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            if (!(cost(i, j) >= 0) || !std::isfinite(cost(i, j)))
                throw ConfigError("solve_transport: costs must be finite and >= 0");
            cmax = std::max(cmax, cost(i, j));
        }
    const double scale = std::max(1.0, cmax);

    // Northwest-corner initial basis: a staircase of exactly m+n-1 cells.
    std::vector<BasicCell> basis;
    basis.reserve(m + n - 1);
    {
        std::vector<double> a = supply, b = demand;
        int i = 0, j = 0;
        while (true) {
            double t = std::min(a[i], b[j]);
            basis.push_back({i, j, std::max(0.0, t)});
            a[i] -= t;
            b[j] -= t;
            if (i == m - 1 && j == n - 1) break;
            if (a[i] <= 0 && i < m - 1)
                ++i;
            else if (j < n - 1)
                ++j;
            else
                ++i;
        }
    }

    Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic> is_basic(m, n);
    is_basic.setZero();
    for (const auto& c : basis) is_basic(c.i, c.j) = 1;

    std::vector<double> u, v;
    const double enter_tol = 1e-14 * scale;
    const long max_iter = 1000 + 100L * m * n;
    long iter = 0;
    for (;; ++iter) {
        if (iter > max_iter)
            throw ConsistencyError(
                "solve_transport: network simplex exceeded " +
                std::to_string(max_iter) + " iterations (possible cycling)");
        compute_duals(basis, m, n, cost, u, v);

        int ei = -1, ej = -1;
        double best = -enter_tol;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                if (is_basic(i, j)) continue;
                double r = cost(i, j) - u[i] - v[j];
                if (r < best) {
                    best = r;
                    ei = i;
                    ej = j;
                }
            }
        }
        if (ei < 0) break;  // optimal

        // Unique cycle: entering arc plus the tree path sink -> source.
        auto path = tree_path(basis, m, n, ei, m + ej);
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        int sign = -1;  // first path arc (adjacent to the entering sink) is -
        for (std::size_t k = 0; k < path.size(); ++k, sign = -sign) {
            if (sign < 0) {
                const auto& c = basis[path[k]];
                if (c.x < theta ||
                    (c.x == theta &&
                     (leave < 0 ||
                      std::make_pair(c.i, c.j) <
                          std::make_pair(basis[leave].i, basis[leave].j)))) {
                    theta = c.x;
                    leave = path[k];
                }
            }
        }
        if (leave < 0)
            throw ConsistencyError("solve_transport: no leaving arc found");

        sign = -1;
        for (std::size_t k = 0; k < path.size(); ++k, sign = -sign)
            basis[path[k]].x += sign * theta;
        is_basic(basis[leave].i, basis[leave].j) = 0;
        basis[leave] = {ei, ej, theta};
        is_basic(ei, ej) = 1;
    }

    // Certificates: marginal feasibility and complementary slackness.
    TransportPlan plan;
    plan.source_mass = supply;
    plan.sink_mass = demand;
    std::vector<double> row(m, 0.0), col(n, 0.0);
    for (const auto& c : basis) {
        if (c.x < -1e-12)
            throw ConsistencyError("solve_transport: negative flow");
        double x = std::max(0.0, c.x);
        row[c.i] += x;
        col[c.j] += x;
        plan.cost += x * cost(c.i, c.j);
        if (x > 0) plan.flows.push_back({c.i, c.j, x});
    }
    for (int i = 0; i < m; ++i)
        if (std::fabs(row[i] - supply[i]) > 1e-9)
            throw ConsistencyError("solve_transport: row marginal violated by " +
                                   std::to_string(std::fabs(row[i] - supply[i])));
    for (int j = 0; j < n; ++j)
        if (std::fabs(col[j] - demand[j]) > 1e-9)
            throw ConsistencyError("solve_transport: column marginal violated");
    compute_duals(basis, m, n, cost, u, v);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (cost(i, j) - u[i] - v[j] < -1e-9 * scale)
                throw ConsistencyError(
                    "solve_transport: optimality certificate failed (negative "
                    "reduced cost after convergence)");
    std::sort(plan.flows.begin(), plan.flows.end(),
              [](const TransportPlan::Flow& a, const TransportPlan::Flow& b) {
                  return std::make_pair(a.from, a.to) <
                         std::make_pair(b.from, b.to);
              });
    return plan;
}

}  // namespace topsim
