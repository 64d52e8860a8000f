#include "topsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "topsim/delaunay.hpp"
#include "topsim/errors.hpp"
#include "topsim/hodge.hpp"

namespace topsim {

namespace {

// Rethrows the first captured per-item exception (smallest index), so the
// parallel variants fail exactly like the serial ones.
void rethrow_first(const std::vector<std::exception_ptr>& errors) {
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int required_pmax(const StageParams& params) {
    int need = std::max(params.p + 1, params.kmax_dim + 1);
    return std::clamp(need, 1, 3);
}

double ugh_cell(const Ultrametric& a, const Ultrametric& b) {
    if (a.empty() || b.empty())
        return std::numeric_limits<double>::quiet_NaN();
    return ugh(a, b);
}

}  // namespace

Ultrametric structure_ultrametric(const PointCloud& cloud,
                                  const StageParams& params) {
    const int p_max = required_pmax(params);
    SimplicialComplex K =
        params.kind == ComplexKind::VR
            ? build_vr(cloud, params.threshold, p_max)
            : build_alpha(cloud, params.threshold, p_max);
    GeneratorSet G = harmonic_generators(K, params.p);
    MetricSpace M = generator_metric_space(G, params.metric, K);
    return subdominant_ultrametric(M);
}

std::vector<Ultrametric> structure_ultrametrics_serial(
    const std::vector<PointCloud>& clouds, const StageParams& params) {
    std::vector<Ultrametric> out(clouds.size());
    for (std::size_t i = 0; i < clouds.size(); ++i)
        out[i] = structure_ultrametric(clouds[i], params);
    return out;
}

std::vector<Ultrametric> structure_ultrametrics_parallel(
    const std::vector<PointCloud>& clouds, const StageParams& params) {
    const int n = static_cast<int>(clouds.size());
    std::vector<Ultrametric> out(clouds.size());
    std::vector<std::exception_ptr> errors(clouds.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            out[i] = structure_ultrametric(clouds[i], params);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    rethrow_first(errors);
    return out;
}

Eigen::MatrixXd cross_ugh_serial(const std::vector<Ultrametric>& ultras) {
    const int n = static_cast<int>(ultras.size());
    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i)
        D(i, i) = ultras[i].empty()
                      ? std::numeric_limits<double>::quiet_NaN()
                      : 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = ugh_cell(ultras[i], ultras[j]);
            D(i, j) = v;
            D(j, i) = v;
        }
    return D;
}

Eigen::MatrixXd cross_ugh_parallel(const std::vector<Ultrametric>& ultras) {
    const int n = static_cast<int>(ultras.size());
    Eigen::MatrixXd D(n, n);
    std::vector<std::pair<int, int>> cells;
    cells.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        D(i, i) = ultras[i].empty()
                      ? std::numeric_limits<double>::quiet_NaN()
                      : 0.0;
        for (int j = i + 1; j < n; ++j) cells.emplace_back(i, j);
    }
    const int m = static_cast<int>(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < m; ++c) {
        try {
            auto [i, j] = cells[c];
            double v = ugh_cell(ultras[i], ultras[j]);
            D(i, j) = v;
            D(j, i) = v;
        } catch (...) {
            errors[c] = std::current_exception();
        }
    }
    rethrow_first(errors);
    return D;
}

namespace {

int nearest_centroid(const Eigen::MatrixXd& points,
                     const Eigen::MatrixXd& centroids, int row) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < centroids.rows(); ++c) {
        double d = (points.row(row) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

std::vector<int> assign_clusters_serial(const Eigen::MatrixXd& points,
                                        const Eigen::MatrixXd& centroids) {
    if (centroids.rows() == 0)
        throw ConfigError("assign_clusters: no centroids");
    if (points.cols() != centroids.cols())
        throw ConfigError("assign_clusters: dimension mismatch");
    std::vector<int> labels(points.rows());
    for (int i = 0; i < points.rows(); ++i)
        labels[i] = nearest_centroid(points, centroids, i);
    return labels;
}

std::vector<int> assign_clusters_parallel(const Eigen::MatrixXd& points,
                                          const Eigen::MatrixXd& centroids) {
    if (centroids.rows() == 0)
        throw ConfigError("assign_clusters: no centroids");
    if (points.cols() != centroids.cols())
        throw ConfigError("assign_clusters: dimension mismatch");
    const int n = static_cast<int>(points.rows());
    std::vector<int> labels(points.rows());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        labels[i] = nearest_centroid(points, centroids, i);
    return labels;
}

}  // namespace topsim
