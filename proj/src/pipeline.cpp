#include "topsim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "topsim/delaunay.hpp"

namespace topsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double uniform01(std::mt19937_64& rng) {
    // 53 random bits mapped to [0, 1); fixed mapping so streams are
    // reproducible across platforms and standard-library versions.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0)
        .count();
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("pipeline: cannot write " + path);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) f << ",";
            f << fmt17(M(i, j));
        }
        f << "\n";
    }
}

long long require_int(const json& j, const std::string& key, long long lo,
                      long long hi) {
    if (!j.at(key).is_number_integer())
        throw ConfigError("config: '" + key + "' must be an integer");
    long long v = j.at(key).get<long long>();
    if (v < lo || v > hi)
        throw ConfigError("config: '" + key + "' out of range [" +
                          std::to_string(lo) + ", " + std::to_string(hi) +
                          "]");
    return v;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config: top level must be a JSON object");

    static const std::set<std::string> known{
        "inputs", "kind", "thresholds", "metric",   "p",
        "kmax_dim", "k",  "seed",       "restarts", "jitter"};
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw ConfigError("config: unknown key '" + item.key() + "'");

    RunConfig c;
    if (!j.contains("inputs") || !j["inputs"].is_array() ||
        j["inputs"].empty())
        throw ConfigError("config: 'inputs' must be a non-empty array");
    for (const auto& v : j["inputs"]) {
        if (!v.is_string())
            throw ConfigError("config: 'inputs' entries must be strings");
        c.inputs.push_back(v.get<std::string>());
    }
    if (j.contains("kind")) {
        if (!j["kind"].is_string())
            throw ConfigError("config: 'kind' must be a string");
        c.kind = complex_kind_from_string(j["kind"].get<std::string>());
    }
    if (j.contains("thresholds")) {
        if (!j["thresholds"].is_array() || j["thresholds"].empty())
            throw ConfigError(
                "config: 'thresholds' must be a non-empty array");
        c.thresholds.clear();
        for (const auto& v : j["thresholds"]) {
            if (!v.is_number())
                throw ConfigError("config: thresholds must be numbers");
            double t = v.get<double>();
            if (!(t > 0) || !std::isfinite(t))
                throw ConfigError(
                    "config: thresholds must be positive and finite");
            c.thresholds.push_back(t);
        }
        std::set<double> uniq(c.thresholds.begin(), c.thresholds.end());
        if (uniq.size() != c.thresholds.size())
            throw ConfigError("config: thresholds must be distinct");
    }
    if (j.contains("metric")) {
        if (!j["metric"].is_string())
            throw ConfigError("config: 'metric' must be a string");
        c.metric = metric_kind_from_string(j["metric"].get<std::string>());
    }
    if (j.contains("p")) c.p = static_cast<int>(require_int(j, "p", 0, 3));
    if (j.contains("kmax_dim"))
        c.kmax_dim = static_cast<int>(require_int(j, "kmax_dim", 0, 3));
    if (j.contains("k")) c.k = static_cast<int>(require_int(j, "k", 1, 1 << 20));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() ||
            (j["seed"].is_number_integer() && j["seed"].get<long long>() < 0 &&
             !j["seed"].is_number_unsigned()))
            throw ConfigError("config: 'seed' must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("restarts"))
        c.restarts = static_cast<int>(require_int(j, "restarts", 1, 100000));
    if (j.contains("jitter") && !j["jitter"].is_null()) {
        const auto& jj = j["jitter"];
        if (!jj.is_object())
            throw ConfigError("config: 'jitter' must be an object");
        for (const auto& item : jj.items())
            if (item.key() != "sigma" && item.key() != "seed")
                throw ConfigError("config: unknown jitter key '" +
                                  item.key() + "'");
        if (!jj.contains("sigma") || !jj["sigma"].is_number())
            throw ConfigError("config: jitter.sigma must be a number");
        JitterSpec spec;
        spec.sigma = jj["sigma"].get<double>();
        if (!(spec.sigma > 0) || !std::isfinite(spec.sigma))
            throw ConfigError("config: jitter.sigma must be positive");
        if (jj.contains("seed"))
            spec.seed = jj["seed"].get<std::uint64_t>();
        c.jitter = spec;
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    return parse_run_config(text);
}

UghMatrix assemble_ugh_matrix(const std::vector<Ultrametric>& ultras,
                              double threshold) {
    const int n = static_cast<int>(ultras.size());
    UghMatrix M;
    M.threshold = threshold;
    M.values = cross_ugh_parallel(ultras);
    M.substituted.setZero(n, n);
    for (const auto& u : ultras) M.n_empty += u.empty() ? 1 : 0;

    double max_finite = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::isfinite(M.values(i, j)))
                max_finite = std::max(max_finite, M.values(i, j));

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(M.values(i, j))) {
                M.values(i, j) = i == j ? 0.0 : max_finite;
                M.substituted(i, j) = 1;
            }

    // The strong triangle inequality must survive assembly on triples whose
    // three pairwise values are all genuine.
    const double tol = 1e-9 * std::max(1.0, max_finite);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                if (M.substituted(i, j) || M.substituted(j, k) ||
                    M.substituted(i, k))
                    continue;
                double a = M.values(i, j), b = M.values(j, k),
                       cij = M.values(i, k);
                if (cij > std::max(a, b) + tol || a > std::max(cij, b) + tol ||
                    b > std::max(a, cij) + tol)
                    throw ConsistencyError(
                        "ugh matrix: strong triangle inequality violated on "
                        "triple (" +
                        std::to_string(i) + "," + std::to_string(j) + "," +
                        std::to_string(k) + ")");
            }
    return M;
}

Eigen::MatrixXd feature_matrix(const std::vector<UghMatrix>& stages) {
    if (stages.empty()) throw ConfigError("feature_matrix: no stages");
    const Eigen::Index n = stages.front().values.rows();
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(stages.size()) * n);
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const auto& V = stages[s].values;
        if (V.rows() != n || V.cols() != n)
            throw ConsistencyError(
                "feature_matrix: stage blocks have mismatched sizes");
        X.block(0, static_cast<Eigen::Index>(s) * n, n, n) = V;
    }
    return X;
}

KMeansResult kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed,
                    int restarts) {
    const int n = static_cast<int>(X.rows());
    if (k < 1) throw ConfigError("kmeans: k must be >= 1");
    if (restarts < 1) throw ConfigError("kmeans: restarts must be >= 1");
    if (n == 0) throw DataError("kmeans: no samples");
    if (k > n)
        throw ConfigError("kmeans: k = " + std::to_string(k) +
                          " exceeds sample count " + std::to_string(n));
    if (!X.allFinite()) throw DataError("kmeans: non-finite feature matrix");

    std::mt19937_64 rng(seed);
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (int r = 0; r < restarts; ++r) {
        // k-means++ seeding.
        Eigen::MatrixXd C(k, X.cols());
        int first = std::min(static_cast<int>(uniform01(rng) * n), n - 1);
        C.row(0) = X.row(first);
        Eigen::VectorXd d2(n);
        for (int i = 0; i < n; ++i)
            d2(i) = (X.row(i) - C.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
            double total = d2.sum();
            int pick;
            if (total <= 0) {
                pick = std::min(static_cast<int>(uniform01(rng) * n), n - 1);
            } else {
                double target = uniform01(rng) * total;
                double acc = 0;
                pick = n - 1;
                for (int i = 0; i < n; ++i) {
                    acc += d2(i);
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            }
            C.row(c) = X.row(pick);
            for (int i = 0; i < n; ++i)
                d2(i) = std::min(d2(i),
                                 (X.row(i) - C.row(c)).squaredNorm());
        }

        // Lloyd iterations.
        std::vector<int> labels = assign_clusters_parallel(X, C);
        for (int it = 0; it < 300; ++it) {
            std::vector<int> counts(k, 0);
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
            for (int i = 0; i < n; ++i) {
                counts[labels[i]]++;
                sums.row(labels[i]) += X.row(i);
            }
            for (int c = 0; c < k; ++c) {
                if (counts[c] > 0) {
                    C.row(c) = sums.row(c) / counts[c];
                    continue;
                }
                // Re-seed an empty cluster from the farthest point of a
                // non-singleton cluster.
                int far = -1;
                double far_d = -1;
                for (int i = 0; i < n; ++i) {
                    if (counts[labels[i]] <= 1) continue;
                    double d = (X.row(i) - C.row(labels[i])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                if (far < 0)
                    throw ConsistencyError(
                        "kmeans: cannot repopulate empty cluster");
                counts[labels[far]]--;
                sums.row(labels[far]) -= X.row(far);
                C.row(labels[far]) =
                    sums.row(labels[far]) / counts[labels[far]];
                labels[far] = c;
                counts[c] = 1;
                C.row(c) = X.row(far);
            }
            std::vector<int> next = assign_clusters_parallel(X, C);
            bool changed = next != labels;
            labels = std::move(next);
            if (!changed) break;
        }

        double inertia = 0;
        for (int i = 0; i < n; ++i)
            inertia += (X.row(i) - C.row(labels[i])).squaredNorm();
        if (inertia < best.inertia) {
            best.inertia = inertia;
            best.labels = labels;
            best.centroids = C;
        }
    }
    return best;
}

double ari(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size())
        throw ConfigError("ari: labelings have different lengths");
    const std::size_t n = a.size();
    if (n == 0) throw DataError("ari: empty labelings");

    std::map<std::pair<int, int>, double> cont;
    std::map<int, double> row, col;
    for (std::size_t i = 0; i < n; ++i) {
        cont[{a[i], b[i]}] += 1;
        row[a[i]] += 1;
        col[b[i]] += 1;
    }
    auto comb2 = [](double m) { return m * (m - 1) / 2; };
    double sum_ij = 0, sum_a = 0, sum_b = 0;
    for (const auto& [key, v] : cont) sum_ij += comb2(v);
    for (const auto& [key, v] : row) sum_a += comb2(v);
    for (const auto& [key, v] : col) sum_b += comb2(v);

    double total = comb2(static_cast<double>(n));
    double expected = total > 0 ? sum_a * sum_b / total : 0;
    double max_index = 0.5 * (sum_a + sum_b);
    double denom = max_index - expected;
    if (std::fabs(denom) < 1e-15) {
        // Degenerate correction (e.g. both all-singletons): identical
        // partitions score 1, anything else 0.
        std::map<int, int> ra, rb;
        bool same = true;
        for (std::size_t i = 0; i < n && same; ++i) {
            int ca = ra.emplace(a[i], static_cast<int>(ra.size())).first->second;
            int cb = rb.emplace(b[i], static_cast<int>(rb.size())).first->second;
            same = ca == cb;
        }
        return same ? 1.0 : 0.0;
    }
    return (sum_ij - expected) / denom;
}

PipelineResult run_pipeline(const RunConfig& config,
                            const std::string& out_dir) {
    auto t_total = Clock::now();
    if (config.inputs.empty()) throw ConfigError("pipeline: no inputs");
    if (config.thresholds.empty())
        throw ConfigError("pipeline: no thresholds");
    if (config.p < 0 || config.p > 3)
        throw ConfigError("pipeline: p must be in [0, 3]");
    if (config.kmax_dim < 0 || config.kmax_dim > 3)
        throw ConfigError("pipeline: kmax_dim must be in [0, 3]");

    auto sets = load_inputs(config.inputs);
    std::vector<PointCloud> clouds;
    PipelineResult R;
    for (const auto& s : sets)
        for (const auto& f : s.frames) {
            clouds.push_back(f);
            R.structure_tags.push_back(f.source_tag);
        }
    if (clouds.empty()) throw DataError("pipeline: inputs contain no frames");

    if (config.jitter)
        for (std::size_t i = 0; i < clouds.size(); ++i)
            clouds[i] = jitter_cloud(clouds[i], config.jitter->sigma,
                                     config.jitter->seed + i);

    std::map<std::string, int> first_seen;
    for (const auto& tag : R.structure_tags) {
        auto it = first_seen.emplace(tag, static_cast<int>(first_seen.size()));
        R.true_labels.push_back(it.first->second);
    }

    json stage_reports = json::array();
    for (double t : config.thresholds) {
        auto t0 = Clock::now();
        StageParams sp;
        sp.kind = config.kind;
        sp.threshold = t;
        sp.p = config.p;
        sp.metric = config.metric;
        sp.kmax_dim = config.kmax_dim;
        auto ultras = structure_ultrametrics_parallel(clouds, sp);
        UghMatrix M = assemble_ugh_matrix(ultras, t);
        int n_sub_pairs = 0;
        for (int i = 0; i < M.substituted.rows(); ++i)
            for (int j = i + 1; j < M.substituted.cols(); ++j)
                n_sub_pairs += M.substituted(i, j);
        stage_reports.push_back({{"threshold", t},
                                 {"n_empty", M.n_empty},
                                 {"n_substituted_pairs", n_sub_pairs},
                                 {"time_ms", elapsed_ms(t0)}});
        R.stages.push_back(std::move(M));
    }

    R.features = feature_matrix(R.stages);
    auto t_k = Clock::now();
    R.clustering =
        kmeans(R.features, config.k, config.seed, config.restarts);
    double kmeans_ms = elapsed_ms(t_k);
    R.ari_value = ari(R.clustering.labels, R.true_labels);

    fs::create_directories(out_dir);
    auto emit = [&](const std::string& name) {
        std::string path = (fs::path(out_dir) / name).string();
        R.written_files.push_back(path);
        return path;
    };
    for (const auto& stage : R.stages)
        write_matrix_csv(emit("ugh_t" + fmt_short(stage.threshold) + ".csv"),
                         stage.values);
    write_matrix_csv(emit("features.csv"), R.features);
    {
        std::string path = emit("labels.csv");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw DataError("pipeline: cannot write " + path);
        f << "index,source_tag,true_label,cluster\n";
        for (std::size_t i = 0; i < clouds.size(); ++i)
            f << i << "," << R.structure_tags[i] << "," << R.true_labels[i]
              << "," << R.clustering.labels[i] << "\n";
    }

    json cfg{{"inputs", config.inputs},
             {"kind", to_string(config.kind)},
             {"thresholds", config.thresholds},
             {"metric", to_string(config.metric)},
             {"p", config.p},
             {"kmax_dim", config.kmax_dim},
             {"k", config.k},
             {"seed", config.seed},
             {"restarts", config.restarts}};
    if (config.jitter)
        cfg["jitter"] = {{"sigma", config.jitter->sigma},
                         {"seed", config.jitter->seed}};
    else
        cfg["jitter"] = nullptr;

    json report{{"config", cfg},
                {"n_structures", clouds.size()},
                {"stages", stage_reports},
                {"kmeans", {{"inertia", R.clustering.inertia},
                            {"time_ms", kmeans_ms}}},
                {"ari", R.ari_value},
                {"total_time_ms", elapsed_ms(t_total)}};
    {
        std::string path = emit("report.json");
        report["files"] = R.written_files;
        R.report_json = report.dump(2) + "\n";
        std::ofstream f(path, std::ios::binary);
        if (!f) throw DataError("pipeline: cannot write " + path);
        f << R.report_json;
    }
    return R;
}

}  // namespace topsim
