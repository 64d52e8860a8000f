#pragma once

#include <Eigen/Dense>
#include <vector>

namespace topsim {

// Exact solution of a balanced transportation problem.  Indices refer to the
// supply/demand vectors handed to solve_transport; callers translate them back
// to simplex indices.
struct TransportPlan {
    struct Flow {
        int from = 0, to = 0;
        double mass = 0.0;
    };
    std::vector<double> source_mass, sink_mass;
    std::vector<Flow> flows;
    double cost = 0.0;
};

// Minimum-cost transport between supply and demand (both strictly positive,
// equal totals) under the given cost matrix, via the transportation network
// simplex.  Optimality is re-verified through complementary slackness and
// marginal feasibility (1e-9); failure of either check throws
// ConsistencyError.
TransportPlan solve_transport(const std::vector<double>& supply,
                              const std::vector<double>& demand,
                              const Eigen::MatrixXd& cost);

}  // namespace topsim
