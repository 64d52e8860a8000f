#include "topsim/genmetric.hpp"

#include <cmath>
#include <limits>

namespace topsim {

namespace {

constexpr double kSignEps = 1e-12;
constexpr double kMassEps = 1e-12;

Eigen::VectorXd sign_fixed(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::fabs(v[i]) > kSignEps) return v[i] < 0 ? (-v).eval() : v;
    }
    return v;
}

void check_same_order(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    if (v.size() != w.size())
        throw ConfigError("generator distance: vectors come from different "
                          "simplex orders (lengths " +
                          std::to_string(v.size()) + " vs " +
                          std::to_string(w.size()) + ")");
}

}  // namespace

std::string to_string(MetricKind k) {
    switch (k) {
        case MetricKind::L1: return "l1";
        case MetricKind::Cocycle: return "cocycle";
        case MetricKind::Wasserstein: return "wasserstein";
    }
    return "?";
}

MetricKind metric_kind_from_string(const std::string& s) {
    if (s == "l1") return MetricKind::L1;
    if (s == "cocycle") return MetricKind::Cocycle;
    if (s == "wasserstein") return MetricKind::Wasserstein;
    throw ConfigError("unknown metric kind '" + s +
                      "' (expected l1|cocycle|wasserstein)");
}

double dist_l1(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    check_same_order(v, w);
    return (sign_fixed(v) - sign_fixed(w)).lpNorm<1>();
}

double dist_cocycle(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    check_same_order(v, w);
    return std::fabs(v.lpNorm<1>() - w.lpNorm<1>());
}

double ground_distance(const Simplex& a, const Simplex& b,
                       const PointCloud& cloud) {
    const int n = static_cast<int>(cloud.size());
    for (const Simplex* s : {&a, &b})
        for (int v : s->vertices)
            if (v < 0 || v >= n)
                throw DataError("ground_distance: vertex index out of range");
    double best = std::numeric_limits<double>::infinity();
    for (int x : a.vertices)
        for (int y : b.vertices) {
            if (x == y) return 0.0;
            best = std::min(best, (cloud.points[x] - cloud.points[y]).norm());
        }
    return best;
}

double dist_wasserstein(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                        const SimplicialComplex& K, int p,
                        TransportPlan* plan) {
    check_same_order(v, w);
    if (static_cast<std::size_t>(v.size()) != K.count(p))
        throw ConfigError("dist_wasserstein: vector length does not match the "
                          "p-simplex count of the complex");
    if (!K.cloud) throw DataError("dist_wasserstein: complex has no point cloud");
    if (std::fabs(v.norm() - 1.0) > 1e-8 || std::fabs(w.norm() - 1.0) > 1e-8)
        throw DataError("dist_wasserstein: generators must be unit l2 vectors");

    // Squared entries as probability masses, truncated and renormalized.
    std::vector<int> sv, sw;
    std::vector<double> m1, m2;
    double t1 = 0, t2 = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double q = v[i] * v[i];
        if (q > kMassEps) {
            sv.push_back(static_cast<int>(i));
            m1.push_back(q);
            t1 += q;
        }
        q = w[i] * w[i];
        if (q > kMassEps) {
            sw.push_back(static_cast<int>(i));
            m2.push_back(q);
            t2 += q;
        }
    }
    if (sv.empty() || sw.empty())
        throw DataError("dist_wasserstein: empty support after truncation");
    for (auto& q : m1) q /= t1;
    for (auto& q : m2) q /= t2;
    // Force exact balance onto the last sink so the solver sees equal totals.
    double s1 = 0, s2 = 0;
    for (double q : m1) s1 += q;
    for (std::size_t j = 0; j + 1 < m2.size(); ++j) s2 += m2[j];
    m2.back() = s1 - s2;
    if (!(m2.back() > 0))
        throw ConsistencyError("dist_wasserstein: balance correction failed");

    const auto& simp = K.simplices(p);
    Eigen::MatrixXd cost(sv.size(), sw.size());
    for (std::size_t i = 0; i < sv.size(); ++i)
        for (std::size_t j = 0; j < sw.size(); ++j)
            cost(i, j) = ground_distance(simp[sv[i]], simp[sw[j]], *K.cloud);

    TransportPlan local = solve_transport(m1, m2, cost);
    if (plan) {
        *plan = local;
        for (auto& f : plan->flows) {
            f.from = sv[f.from];
            f.to = sw[f.to];
        }
    }
    return local.cost;
}

MetricSpace generator_metric_space(const GeneratorSet& G, MetricKind kind,
                                   const SimplicialComplex& K) {
    const int k = static_cast<int>(G.vectors.size());
    MetricSpace M;
    M.kind = kind;
    M.p = G.p;
    M.threshold = K.threshold;
    M.structure_id = K.cloud ? K.cloud->source_tag : "";
    M.dmatrix = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            auto element = [&]() {
                switch (kind) {
                    case MetricKind::L1:
                        return dist_l1(G.vectors[i], G.vectors[j]);
                    case MetricKind::Cocycle:
                        return dist_cocycle(G.vectors[i], G.vectors[j]);
                    case MetricKind::Wasserstein:
                    default:
                        return dist_wasserstein(G.vectors[i], G.vectors[j], K,
                                                G.p);
                }
            };
            double d;
            const std::string ctx = "generator_metric_space: pair (" +
                                    std::to_string(i) + "," +
                                    std::to_string(j) + "): ";
            // Propagate element-wise failures with pair context, same class.
            try {
                d = element();
            } catch (ConfigError& e) {
                throw ConfigError(ctx + e.what());
            } catch (ConsistencyError& e) {
                throw ConsistencyError(ctx + e.what());
            } catch (DataError& e) {
                throw DataError(ctx + e.what());
            }
            M.dmatrix(i, j) = d;
            M.dmatrix(j, i) = d;
        }
    }
    return M;
}

}  // namespace topsim
