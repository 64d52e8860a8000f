#include "topsim/ultra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace topsim {

namespace {

std::string fmt_height(double h) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", h);
    return buf;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<double> distinct_values(const Eigen::MatrixXd& d) {
    std::set<double> s;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j) s.insert(d(i, j));
    return {s.begin(), s.end()};
}

}  // namespace

Ultrametric subdominant_ultrametric(const Eigen::MatrixXd& M,
                                    std::string provenance) {
    const int n = static_cast<int>(M.rows());
    if (M.cols() != n)
        throw ConfigError("subdominant_ultrametric: matrix not square");
    Ultrametric U;
    U.provenance = std::move(provenance);
    if (n == 0) {
        U.d.resize(0, 0);
        U.provenance += " (empty)";
        return U;
    }
    double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
        throw ConsistencyError(
            "subdominant_ultrametric: input asymmetric beyond 1e-12");
    Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    for (int i = 0; i < n; ++i) {
        if (std::fabs(S(i, i)) > 1e-12)
            throw DataError("subdominant_ultrametric: nonzero diagonal");
        S(i, i) = 0.0;
        for (int j = 0; j < n; ++j)
            if (!(S(i, j) >= 0) || !std::isfinite(S(i, j)))
                throw DataError(
                    "subdominant_ultrametric: negative or non-finite entry");
    }

    // Prim minimum spanning tree over the complete graph.
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<int> edge_to(n, -1);
    std::vector<char> in_tree(n, 0);
    std::vector<std::vector<int>> adj(n);
    best[0] = 0;
    for (int it = 0; it < n; ++it) {
        int u = -1;
        for (int i = 0; i < n; ++i)
            if (!in_tree[i] && (u < 0 || best[i] < best[u])) u = i;
        in_tree[u] = 1;
        if (edge_to[u] >= 0) {
            adj[u].push_back(edge_to[u]);
            adj[edge_to[u]].push_back(u);
        }
        for (int i = 0; i < n; ++i)
            if (!in_tree[i] && S(u, i) < best[i]) {
                best[i] = S(u, i);
                edge_to[i] = u;
            }
    }

    // Minimax path values by a running-max DFS from every root.
    U.d = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> stack;
    std::vector<char> seen(n);
    for (int root = 0; root < n; ++root) {
        std::fill(seen.begin(), seen.end(), 0);
        stack.assign(1, root);
        seen[root] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u]) {
                if (seen[v]) continue;
                seen[v] = 1;
                double h = std::max(U.d(root, u), S(u, v));
                U.d(root, v) = h;
                U.d(v, root) = h;
                stack.push_back(v);
            }
        }
    }
    U.spectrum_values = distinct_values(U.d);
    return U;
}

Ultrametric subdominant_ultrametric(const MetricSpace& M) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s@t=%g,p=%d,%s", M.structure_id.c_str(),
                  M.threshold, M.p, to_string(M.kind).c_str());
    return subdominant_ultrametric(M.dmatrix, buf);
}

Dendrogram dendrogram(const Ultrametric& U) {
    const int n = U.size();
    if (n == 0) throw DataError("dendrogram: empty ultrametric");
    Dendrogram D;
    for (int i = 0; i < n; ++i) {
        Dendrogram::Node leaf;
        leaf.leaf = i;
        D.nodes.push_back(leaf);
    }
    if (n == 1) {
        D.root = 0;
        return D;
    }

    std::set<double> vals;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) vals.insert(U.d(i, j));

    UnionFind uf(n);
    std::map<int, int> comp_node;  // representative -> node id
    for (int i = 0; i < n; ++i) comp_node[i] = i;

    for (double v : vals) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (U.d(i, j) == v) uf.unite(i, j);
        std::map<int, std::vector<int>> regroup;  // new rep -> old node ids
        for (const auto& [rep, node] : comp_node)
            regroup[uf.find(rep)].push_back(node);
        std::map<int, int> next;
        for (auto& [rep, members] : regroup) {
            if (members.size() == 1) {
                next[rep] = members.front();
                continue;
            }
            Dendrogram::Node parent;
            parent.height = v;
            parent.leaf = -1;
            std::sort(members.begin(), members.end());
            parent.children = members;
            parent.count = 0;
            for (int c : members) {
                parent.count += D.nodes[c].count;
                if (D.nodes[c].leaf < 0 && D.nodes[c].height >= v)
                    throw ConsistencyError(
                        "dendrogram: merge heights not increasing");
            }
            next[rep] = static_cast<int>(D.nodes.size());
            D.nodes.push_back(std::move(parent));
        }
        comp_node = std::move(next);
    }
    if (comp_node.size() != 1)
        throw ConsistencyError("dendrogram: merges left multiple roots");
    D.root = comp_node.begin()->second;
    return D;
}

std::string canonical_code(const Dendrogram& D) {
    if (D.root < 0) throw ConfigError("canonical_code: invalid dendrogram");
    std::function<std::string(int)> code = [&](int id) -> std::string {
        const auto& node = D.nodes[id];
        if (node.leaf >= 0) return "L";
        std::vector<std::string> parts;
        parts.reserve(node.children.size());
        for (int c : node.children) parts.push_back(code(c));
        std::sort(parts.begin(), parts.end());
        std::string out = "(" + fmt_height(node.height) + "|";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) out += ",";
            out += parts[i];
        }
        return out + ")";
    };
    return code(D.root);
}

std::string to_newick(const Dendrogram& D) {
    if (D.root < 0) throw ConfigError("to_newick: invalid dendrogram");
    std::function<std::string(int, double)> emit = [&](int id,
                                                       double parent_h) {
        const auto& node = D.nodes[id];
        double h = node.leaf >= 0 ? 0.0 : node.height;
        std::string branch = ":" + fmt_height(parent_h - h);
        if (node.leaf >= 0) return std::to_string(node.leaf) + branch;
        std::string out = "(";
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            if (i) out += ",";
            out += emit(node.children[i], h);
        }
        out += ")";
        return id == D.root ? out : out + branch;
    };
    return emit(D.root, D.nodes[D.root].leaf >= 0 ? 0.0
                                                  : D.nodes[D.root].height) +
           ";";
}

Ultrametric quotient(const Ultrametric& U, double t) {
    if (t < 0) throw ConfigError("quotient: t must be >= 0");
    const int n = U.size();
    Ultrametric Q;
    Q.provenance = U.provenance + "/quotient";
    if (n == 0) {
        Q.d.resize(0, 0);
        return Q;
    }
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (U.d(i, j) <= t) uf.unite(i, j);

    std::map<int, int> rep_to_class;  // keyed by minimum member
    std::vector<int> min_member(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = uf.find(i);
        if (min_member[r] < 0) min_member[r] = i;
    }
    std::vector<int> reps;
    for (int i = 0; i < n; ++i)
        if (min_member[i] >= 0) reps.push_back(min_member[i]);
    std::sort(reps.begin(), reps.end());

    const int m = static_cast<int>(reps.size());
    Q.d = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            double v = U.d(reps[a], reps[b]);
            if (v <= t)
                throw ConsistencyError(
                    "quotient: inherited distance not above t (input not "
                    "ultrametric?)");
            Q.d(a, b) = v;
            Q.d(b, a) = v;
        }
    }
    Q.spectrum_values = distinct_values(Q.d);
    return Q;
}

double ugh(const Ultrametric& X, const Ultrametric& Y) {
    if (X.empty() || Y.empty())
        throw EmptySpaceError(
            "ugh: undefined for an empty ultrametric space (see pipeline "
            "empty-space policy)");

    // Joint spectrum, deduplicated at relative tolerance 1e-9 and snapped to
    // each cluster's minimum so equal merge heights compare exactly.
    std::set<double> raw{0.0};
    for (int i = 0; i < X.size(); ++i)
        for (int j = i + 1; j < X.size(); ++j) raw.insert(X.d(i, j));
    for (int i = 0; i < Y.size(); ++i)
        for (int j = i + 1; j < Y.size(); ++j) raw.insert(Y.d(i, j));

    std::map<double, double> snap;
    double cluster_min = 0;
    bool first = true;
    double prev = 0;
    for (double v : raw) {
        if (first || v - prev > 1e-9 * std::max(1.0, v)) cluster_min = v;
        snap[v] = cluster_min;
        prev = v;
        first = false;
    }

    auto snapped = [&](const Ultrametric& U) {
        Ultrametric S = U;
        for (int i = 0; i < U.size(); ++i)
            for (int j = 0; j < U.size(); ++j)
                if (i != j) S.d(i, j) = snap.at(U.d(i, j));
        S.spectrum_values = distinct_values(S.d);
        return S;
    };
    Ultrametric Xs = snapped(X), Ys = snapped(Y);

    std::set<double> candidates;
    for (const auto& [v, s] : snap) {
        (void)v;
        candidates.insert(s);
    }
    candidates.insert(0.0);

    for (double t : candidates) {
        Ultrametric qx = quotient(Xs, t), qy = quotient(Ys, t);
        if (qx.size() != qy.size()) continue;
        if (canonical_code(dendrogram(qx)) == canonical_code(dendrogram(qy)))
            return t;
    }
    throw ConsistencyError("ugh: no isometric quotient found (unreachable)");
}

double ugh_bruteforce(const Ultrametric& X, const Ultrametric& Y) {
    if (X.empty() || Y.empty())
        throw EmptySpaceError("ugh_bruteforce: undefined for an empty space");
    const int nx = X.size(), ny = Y.size();
    if (nx > 5 || ny > 5)
        throw ConfigError("ugh_bruteforce: spaces larger than 5 points");

    auto lambda = [](double a, double b) { return a == b ? 0.0 : std::max(a, b); };

    // Candidate subsets of Y per X point, smallest first for better pruning.
    std::vector<int> masks;
    for (int m = 1; m < (1 << ny); ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [](int a, int b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        return pa != pb ? pa < pb : a < b;
    });

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> chosen(nx, 0);

    std::function<void(int, int, double)> dfs = [&](int x, int covered,
                                                    double dist) {
        if (dist >= best) return;
        if (x == nx) {
            if (covered == (1 << ny) - 1) best = dist;
            return;
        }
        for (int mask : masks) {
            double d = dist;
            for (int y = 0; y < ny && d < best; ++y) {
                if (!(mask & (1 << y))) continue;
                // Pairs within the new assignment and against previous ones.
                for (int y2 = y + 1; y2 < ny; ++y2)
                    if (mask & (1 << y2))
                        d = std::max(d, lambda(0.0, Y.d(y, y2)));
                for (int x2 = 0; x2 < x; ++x2)
                    for (int y2 = 0; y2 < ny; ++y2)
                        if (chosen[x2] & (1 << y2))
                            d = std::max(d, lambda(X.d(x, x2), Y.d(y, y2)));
            }
            if (d >= best) continue;
            chosen[x] = mask;
            dfs(x + 1, covered | mask, d);
            chosen[x] = 0;
        }
    };
    dfs(0, 0, 0.0);
    return best;
}

}  // namespace topsim
