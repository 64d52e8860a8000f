#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "topsim/hodge.hpp"
#include "topsim/simplicial_complex.hpp"
#include "topsim/transport.hpp"

namespace topsim {

enum class MetricKind { L1, Cocycle, Wasserstein };

std::string to_string(MetricKind k);
MetricKind metric_kind_from_string(const std::string& s);

// Pairwise distances between the generators of one structure.
struct MetricSpace {
    Eigen::MatrixXd dmatrix;  // k x k, symmetric, zero diagonal
    MetricKind kind = MetricKind::L1;
    std::string structure_id;
    double threshold = 0.0;
    int p = 0;
};

// ||v - w||_1 after both vectors pass the first-significant-entry sign rule.
double dist_l1(const Eigen::VectorXd& v, const Eigen::VectorXd& w);

// | ||v||_1 - ||w||_1 |.
double dist_cocycle(const Eigen::VectorXd& v, const Eigen::VectorXd& w);

// Minimum Euclidean distance between any vertex of a and any vertex of b;
// zero when they share a vertex.  Not a metric on simplices, by design.
double ground_distance(const Simplex& a, const Simplex& b,
                       const PointCloud& cloud);

// Exact 1-Wasserstein distance between the squared-entry measures of two unit
// generators over the p-simplices of K, with supports truncated at
// mass 1e-12 and renormalized.  Optionally returns the optimal plan (flow
// indices refer to p-simplex indices in K).
double dist_wasserstein(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                        const SimplicialComplex& K, int p,
                        TransportPlan* plan = nullptr);

MetricSpace generator_metric_space(const GeneratorSet& G, MetricKind kind,
                                   const SimplicialComplex& K);

}  // namespace topsim
