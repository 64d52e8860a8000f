#include "topsim/simplicial_complex.hpp"

#include <algorithm>
#include <cmath>

namespace topsim {

namespace {
constexpr int kMaxVertices = 65535;  // vertex ids are packed 16 bits each
}

std::string to_string(ComplexKind k) {
    return k == ComplexKind::VR ? "vr" : "alpha";
}

ComplexKind complex_kind_from_string(const std::string& s) {
    if (s == "vr") return ComplexKind::VR;
    if (s == "alpha") return ComplexKind::Alpha;
    throw ConfigError("unknown complex kind '" + s + "' (expected vr|alpha)");
}

std::uint64_t SimplicialComplex::key_of(const std::vector<int>& vertices) {
    std::uint64_t key = 0;
    for (int v : vertices) key = (key << 16) | static_cast<std::uint64_t>(v + 1);
    return key;
}

const std::vector<Simplex>& SimplicialComplex::simplices(int dim) const {
    static const std::vector<Simplex> empty;
    if (dim < 0 || dim > kMaxDim) return empty;
    return by_dim_[dim];
}

std::size_t SimplicialComplex::count(int dim) const {
    if (dim < 0 || dim > kMaxDim) return 0;
    return by_dim_[dim].size();
}

int SimplicialComplex::index_of(const std::vector<int>& vertices) const {
    int d = static_cast<int>(vertices.size()) - 1;
    if (d < 0 || d > kMaxDim) return -1;
    auto it = lookup_[d].find(key_of(vertices));
    return it == lookup_[d].end() ? -1 : it->second;
}

bool SimplicialComplex::contains(const std::vector<int>& vertices) const {
    return index_of(vertices) >= 0;
}

void SimplicialComplex::add(Simplex s) {
    int d = s.dim();
    if (d < 0 || d > kMaxDim)
        throw ConfigError("simplex dimension out of range: " + std::to_string(d));
    for (std::size_t i = 0; i + 1 < s.vertices.size(); ++i) {
        if (s.vertices[i] >= s.vertices[i + 1])
            throw ConsistencyError("simplex vertices must be strictly increasing");
    }
    if (!s.vertices.empty() &&
        (s.vertices.front() < 0 || s.vertices.back() >= kMaxVertices))
        throw DataError("vertex index out of supported range");
    if (!(s.filtration >= 0.0) || !std::isfinite(s.filtration))
        throw ConsistencyError("simplex filtration must be finite and non-negative");
    by_dim_[d].push_back(std::move(s));
}

void SimplicialComplex::finalize() {
    p_max = 0;
    for (int d = 0; d <= kMaxDim; ++d) {
        auto& list = by_dim_[d];
        std::sort(list.begin(), list.end(), [](const Simplex& a, const Simplex& b) {
            return a.vertices < b.vertices;
        });
        lookup_[d].clear();
        lookup_[d].reserve(list.size() * 2);
        for (std::size_t i = 0; i < list.size(); ++i) {
            auto [it, fresh] = lookup_[d].emplace(key_of(list[i].vertices), static_cast<int>(i));
            (void)it;
            if (!fresh) throw ConsistencyError("duplicate simplex in complex");
        }
        if (!list.empty()) p_max = d;
    }
    // downward closure + monotone filtration
    for (int d = 1; d <= p_max; ++d) {
        for (const auto& s : by_dim_[d]) {
            for (const auto& f : facets_of(s.vertices)) {
                int idx = index_of(f);
                if (idx < 0) throw ConsistencyError("complex is not downward closed");
                if (by_dim_[d - 1][idx].filtration > s.filtration + 1e-12)
                    throw ConsistencyError("filtration is not monotone across a face pair");
            }
        }
    }
}

std::size_t SimplicialComplex::total() const {
    std::size_t n = 0;
    for (int d = 0; d <= kMaxDim; ++d) n += by_dim_[d].size();
    return n;
}

std::vector<std::vector<int>> facets_of(const std::vector<int>& vertices) {
    std::vector<std::vector<int>> out;
    if (vertices.size() <= 1) return out;
    out.reserve(vertices.size());
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        std::vector<int> f;
        f.reserve(vertices.size() - 1);
        for (std::size_t i = 0; i < vertices.size(); ++i)
            if (i != k) f.push_back(vertices[i]);
        out.push_back(std::move(f));
    }
    return out;
}

SimplicialComplex build_vr(const PointCloud& cloud, double threshold, int p_max) {
    if (p_max < 1 || p_max > 3)
        throw ConfigError("vr p_max must be in [1,3], got " + std::to_string(p_max));
    if (!(threshold > 0.0))
        throw ConfigError("vr threshold must be positive");
    validate_cloud(cloud);

    const int n = static_cast<int>(cloud.size());
    if (n > kMaxVertices) throw DataError("point cloud too large for complex construction");

    SimplicialComplex K;
    K.kind = ComplexKind::VR;
    K.threshold = threshold;
    K.cloud = std::make_shared<PointCloud>(cloud);

    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double d = (cloud.points[i] - cloud.points[j]).norm();
            dist(i, j) = dist(j, i) = d;
        }
    }

    for (int i = 0; i < n; ++i) K.add({{i}, 0.0});

    std::vector<std::vector<int>> nbr(n);  // neighbors with larger index
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist(i, j) <= threshold) {
                K.add({{i, j}, dist(i, j)});
                nbr[i].push_back(j);
            }

    if (p_max >= 2) {
        for (int i = 0; i < n; ++i)
            for (int j : nbr[i])
                for (int k : nbr[j]) {
                    if (dist(i, k) > threshold) continue;
                    double f = std::max({dist(i, j), dist(j, k), dist(i, k)});
                    K.add({{i, j, k}, f});
                    if (p_max >= 3) {
                        for (int l : nbr[k]) {
                            if (dist(i, l) > threshold || dist(j, l) > threshold) continue;
                            double g = std::max({f, dist(k, l), dist(i, l), dist(j, l)});
                            K.add({{i, j, k, l}, g});
                        }
                    }
                }
    }

    K.finalize();
    return K;
}

int upper_degree(const SimplicialComplex& K, const Simplex& s) {
    if (!K.contains(s.vertices))
        throw DataError("upper_degree: simplex not present in complex");
    int p = s.dim();
    int deg = 0;
    for (const auto& t : K.simplices(p + 1)) {
        if (std::includes(t.vertices.begin(), t.vertices.end(), s.vertices.begin(),
                          s.vertices.end()))
            ++deg;
    }
    return deg;
}

}  // namespace topsim
