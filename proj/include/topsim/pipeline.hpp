#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topsim/kernels.hpp"

namespace topsim {

struct JitterSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// Run configuration, normally read from a JSON file:
//   {inputs, kind, thresholds, metric, p, kmax_dim, k, seed, restarts, jitter?}
struct RunConfig {
    std::vector<std::string> inputs;  // .xyz files or directories of them
    ComplexKind kind = ComplexKind::Alpha;
    std::vector<double> thresholds{3.5, 4.0, 5.0, 6.0};
    MetricKind metric = MetricKind::L1;
    int p = 1;
    int kmax_dim = 2;
    int k = 3;
    std::uint64_t seed = 0;
    int restarts = 10;
    std::optional<JitterSpec> jitter;
};

// Strict parse: unknown keys, wrong types or out-of-range values raise
// ConfigError.  Missing optional keys take the defaults above.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// One threshold's pairwise u_GH matrix after the empty-space policy: cells
// where either structure has no degree-p cohomology are substituted with the
// largest finite u_GH observed at this threshold (0 when none exists) and
// flagged in `substituted`.
struct UghMatrix {
    double threshold = 0.0;
    Eigen::MatrixXd values;
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> substituted;  // 0/1
    int n_empty = 0;  // structures with empty generator space
};

// Applies the substitution policy and re-checks the strong triangle
// inequality on triples of genuine (non-substituted) entries.
UghMatrix assemble_ugh_matrix(const std::vector<Ultrametric>& ultras,
                              double threshold);

// Horizontal concatenation of the per-threshold matrices: the feature vector
// of structure i is the concatenation of row i across thresholds.
Eigen::MatrixXd feature_matrix(const std::vector<UghMatrix>& stages);

struct KMeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centroids;  // k x dim
    double inertia = 0.0;
};

// k-means++ seeding followed by Lloyd iterations (at most 300), empty
// clusters re-seeded from the farthest point, best inertia over `restarts`
// independent starts.  Deterministic in `seed`.
KMeansResult kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed,
                    int restarts);

// Adjusted Rand index between two labelings of the same items.  When the
// correction term degenerates (max index equals its expectation) the value is
// 1 for identical partitions and 0 otherwise.
double ari(const std::vector<int>& a, const std::vector<int>& b);

struct PipelineResult {
    std::vector<std::string> structure_tags;  // per structure, file stem
    std::vector<int> true_labels;             // tag first-appearance order
    std::vector<UghMatrix> stages;
    Eigen::MatrixXd features;
    KMeansResult clustering;
    double ari_value = 0.0;
    std::string report_json;
    std::vector<std::string> written_files;
};

// Full run: ingest, optional jitter, per-threshold u_GH matrices, feature
// assembly, k-means, ARI against the file-of-origin labels.  Writes
// ugh_t<T>.csv, features.csv, labels.csv and report.json into out_dir.
PipelineResult run_pipeline(const RunConfig& config,
                            const std::string& out_dir);

}  // namespace topsim
