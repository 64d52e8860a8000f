#pragma once

#include <Eigen/Dense>
#include <vector>

#include "topsim/genmetric.hpp"
#include "topsim/ingest.hpp"
#include "topsim/ultra.hpp"

namespace topsim {

// Parameters for one filtration stage of the pipeline.  kmax_dim bounds the
// homology degree the complex must support, so simplices are enumerated up to
// dimension kmax_dim + 1.
struct StageParams {
    ComplexKind kind = ComplexKind::Alpha;
    double threshold = 0.0;
    int p = 1;
    MetricKind metric = MetricKind::L1;
    int kmax_dim = 2;
};

// For each input cloud: build the complex at params.threshold, extract the
// harmonic generators of degree params.p, form their metric space and take its
// subdominant ultrametric.  A structure with no degree-p cohomology yields an
// empty ultrametric (flagged via Ultrametric::empty()).  The serial and
// parallel variants produce bitwise-identical results; the serial one is the
// reference implementation.
std::vector<Ultrametric> structure_ultrametrics_serial(
    const std::vector<PointCloud>& clouds, const StageParams& params);
std::vector<Ultrametric> structure_ultrametrics_parallel(
    const std::vector<PointCloud>& clouds, const StageParams& params);

// One ultrametric for a single cloud; shared by both variants above.
Ultrametric structure_ultrametric(const PointCloud& cloud,
                                  const StageParams& params);

// Pairwise u_GH matrix over a family of ultrametrics.  Entries where either
// side is empty are NaN placeholders; the pipeline applies its substitution
// policy on top.  Diagonal is 0 for non-empty spaces, NaN for empty ones.
Eigen::MatrixXd cross_ugh_serial(const std::vector<Ultrametric>& ultras);
Eigen::MatrixXd cross_ugh_parallel(const std::vector<Ultrametric>& ultras);

// Nearest-centroid assignment step of Lloyd's algorithm.  Rows of `points`
// and `centroids` are samples; ties break toward the smaller centroid index.
std::vector<int> assign_clusters_serial(const Eigen::MatrixXd& points,
                                        const Eigen::MatrixXd& centroids);
std::vector<int> assign_clusters_parallel(const Eigen::MatrixXd& points,
                                          const Eigen::MatrixXd& centroids);

}  // namespace topsim
