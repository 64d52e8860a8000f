#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "topsim/genmetric.hpp"

namespace topsim {

// Symmetric non-negative matrix with zero diagonal satisfying the strong
// triangle inequality; entries are drawn exactly from spectrum_values.
struct Ultrametric {
    Eigen::MatrixXd d;
    std::vector<double> spectrum_values;  // sorted distinct entries
    std::string provenance;

    int size() const { return static_cast<int>(d.rows()); }
    bool empty() const { return d.rows() == 0; }
};

// Rooted merge tree; leaves carry point ids, internal nodes carry merge
// heights that strictly increase toward the root.
struct Dendrogram {
    struct Node {
        double height = 0.0;
        int leaf = -1;               // >= 0 for leaves
        std::vector<int> children;   // node ids, empty for leaves
        int count = 1;               // leaves below
    };
    std::vector<Node> nodes;
    int root = -1;
};

// Largest ultrametric pointwise below M: minimax path distances, realized via
// a minimum spanning tree (single-linkage heights).  The input need not obey
// any triangle inequality; it is symmetrized by (M + M^T)/2 after an
// asymmetry check at 1e-12.
Ultrametric subdominant_ultrametric(const Eigen::MatrixXd& M,
                                    std::string provenance = "");
Ultrametric subdominant_ultrametric(const MetricSpace& M);

// Single-linkage merge tree whose lowest-common-ancestor heights reproduce U
// exactly; equal-height merges become one multi-child node.
Dendrogram dendrogram(const Ultrametric& U);

// Deterministic code invariant under child reordering and leaf relabeling;
// two finite ultrametric spaces are isometric iff their codes are equal.
std::string canonical_code(const Dendrogram& D);

// Newick serialization with branch lengths derived from merge heights.
std::string to_newick(const Dendrogram& D);

// Closed quotient at scale t: points at distance <= t merge; inherited
// distances are all > t.
Ultrametric quotient(const Ultrametric& U, double t);

// Gromov-Hausdorff ultrametric: the smallest t in {0} plus the joint value
// spectrum at which the two quotients become isometric.  Values are
// deduplicated across the two spaces at relative tolerance 1e-9 first.
double ugh(const Ultrametric& X, const Ultrametric& Y);

// Exhaustive correspondence oracle (|X|, |Y| <= 5) with distortion
// Lambda(a,b) = 0 if a == b else max(a,b).
double ugh_bruteforce(const Ultrametric& X, const Ultrametric& Y);

}  // namespace topsim
