#include "topsim/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>

#include "topsim/predicates.hpp"

namespace topsim {

namespace {

using predicates::incircle_coplanar;
using predicates::insphere;
using predicates::orient3d;

constexpr int kGhost = -1;

// Tetrahedra are stored as ordered 4-tuples with positive orientation; ghost
// tetrahedra carry kGhost in the last slot, with the real face oriented so that
// its positive side is the unbounded region.
struct Cell {
    std::array<int, 4> v;
    bool alive = true;
    bool ghost() const { return v[3] == kGhost; }
};

std::uint64_t face_key(int a, int b, int c) {
    std::array<int, 3> f = {a, b, c};
    std::sort(f.begin(), f.end());
    std::uint64_t k = 0;
    for (int x : f) k = (k << 21) | static_cast<std::uint64_t>(x + 1);
    return k;
}

bool in_conflict(const Cell& t, const std::vector<Eigen::Vector3d>& pts,
                 const Eigen::Vector3d& p) {
    if (!t.ghost())
        return insphere(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], pts[t.v[3]], p) > 0;
    int o = orient3d(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], p);
    if (o != 0) return o > 0;
    // On the supporting plane of a hull face the limit ball degenerates to the
    // open circumdisk of the face.
    return incircle_coplanar(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], p) > 0;
}

// The outward-oriented boundary faces of a positively oriented 4-tuple.
std::array<std::array<int, 3>, 4> outward_faces(const std::array<int, 4>& t) {
    return {{{t[0], t[2], t[1]},
             {t[0], t[1], t[3]},
             {t[1], t[2], t[3]},
             {t[0], t[3], t[2]}}};
}

// Cone from apex p over an outward boundary face, normalized so that kGhost
// (if present) sits in the last slot via an even permutation.
std::array<int, 4> cone(const std::array<int, 3>& face, int p) {
    std::array<int, 4> t = {face[0], face[2], face[1], p};
    for (int k = 0; k < 3; ++k) {
        if (t[k] == kGhost) {
            std::swap(t[k], t[3]);
            std::swap(t[(k + 1) % 3], t[(k + 2) % 3]);
            break;
        }
    }
    return t;
}

}  // namespace

std::vector<Tetra> delaunay_tetrahedra(const PointCloud& cloud) {
    validate_cloud(cloud);
    const auto& pts = cloud.points;
    const int n = static_cast<int>(pts.size());
    if (n < 5)
        throw DataError("delaunay3d requires at least 5 points, got " +
                        std::to_string(n));

    // Initial non-degenerate tetrahedron from the first points that admit one.
    int i0 = 0, i1 = 1;
    int i2 = -1;
    for (int j = 2; j < n; ++j) {
        if (!predicates::collinear(pts[i0], pts[i1], pts[j])) {
            i2 = j;
            break;
        }
    }
    if (i2 < 0)
        throw DataError("delaunay3d: all points are collinear; use the vr complex");
    int i3 = -1, o0 = 0;
    for (int j = 2; j < n; ++j) {
        if (j == i2) continue;
        o0 = orient3d(pts[i0], pts[i1], pts[i2], pts[j]);
        if (o0 != 0) {
            i3 = j;
            break;
        }
    }
    if (i3 < 0)
        throw DataError("delaunay3d: all points are coplanar; use the vr complex");
    if (o0 < 0) std::swap(i2, i3);

    std::vector<Cell> cells;
    std::array<int, 4> first = {i0, i1, i2, i3};
    cells.push_back({first, true});
    for (const auto& f : outward_faces(first))
        cells.push_back({{f[0], f[1], f[2], kGhost}, true});

    std::vector<char> used(n, 0);
    used[i0] = used[i1] = used[i2] = used[i3] = 1;

    std::vector<int> conflict;
    for (int p = 0; p < n; ++p) {
        if (used[p]) continue;
        conflict.clear();
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (cells[c].alive && in_conflict(cells[c], pts, pts[p]))
                conflict.push_back(static_cast<int>(c));
        if (conflict.empty())
            throw DataError(
                "delaunay3d: degenerate configuration while inserting point " +
                std::to_string(p) + "; perturb the input (--jitter)");

        // Boundary of the conflict region: faces seen exactly once.
        std::unordered_map<std::uint64_t, std::pair<std::array<int, 3>, int>> faces;
        faces.reserve(conflict.size() * 8);
        for (int c : conflict) {
            for (const auto& f : outward_faces(cells[c].v)) {
                auto key = face_key(f[0], f[1], f[2]);
                auto it = faces.find(key);
                if (it == faces.end())
                    faces.emplace(key, std::make_pair(f, 1));
                else
                    it->second.second++;
            }
        }
        for (int c : conflict) cells[c].alive = false;
        for (const auto& [key, entry] : faces) {
            (void)key;
            if (entry.second != 1) continue;
            auto t = cone(entry.first, p);
            if (t[3] != kGhost &&
                orient3d(pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]) <= 0)
                throw DataError(
                    "delaunay3d: degenerate cavity while inserting point " +
                    std::to_string(p) + "; perturb the input (--jitter)");
            cells.push_back({t, true});
        }
        used[p] = 1;
    }

    std::vector<Tetra> out;
    for (const auto& c : cells) {
        if (!c.alive || c.ghost()) continue;
        Tetra t = {c.v[0], c.v[1], c.v[2], c.v[3]};
        std::sort(t.begin(), t.end());
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());

    if (int bad = verify_delaunay(cloud, out); bad > 0)
        throw DataError("delaunay3d: empty-circumsphere verification failed for " +
                        std::to_string(bad) +
                        " tetrahedra; perturb the input (--jitter)");
    return out;
}

int verify_delaunay(const PointCloud& cloud, const std::vector<Tetra>& tets) {
    const auto& pts = cloud.points;
    int violations = 0;
    for (const auto& t : tets) {
        std::array<int, 4> v = {t[0], t[1], t[2], t[3]};
        int o = orient3d(pts[v[0]], pts[v[1]], pts[v[2]], pts[v[3]]);
        if (o == 0) {
            ++violations;
            continue;
        }
        if (o < 0) std::swap(v[2], v[3]);
        for (int q = 0; q < static_cast<int>(pts.size()); ++q) {
            if (q == t[0] || q == t[1] || q == t[2] || q == t[3]) continue;
            if (insphere(pts[v[0]], pts[v[1]], pts[v[2]], pts[v[3]], pts[q]) > 0) {
                ++violations;
                break;
            }
        }
    }
    return violations;
}

double circumradius(const std::vector<Eigen::Vector3d>& pts) {
    const std::size_t m = pts.size();
    if (m < 2 || m > 4)
        throw ConfigError("circumradius expects 2 to 4 points");
    if (m == 2) return 0.5 * (pts[1] - pts[0]).norm();

    // Solve the Gram system for the circumcenter within the affine hull.
    const int k = static_cast<int>(m) - 1;
    Eigen::MatrixXd U(k, 3);
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) {
        Eigen::Vector3d u = pts[i + 1] - pts[0];
        U.row(i) = u.transpose();
        rhs(i) = 0.5 * u.squaredNorm();
    }
    Eigen::MatrixXd G = U * U.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible()) throw DataError("circumradius: degenerate simplex");
    Eigen::VectorXd lam = lu.solve(rhs);
    Eigen::Vector3d c = pts[0] + (U.transpose() * lam);
    return (c - pts[0]).norm();
}

namespace {

// Alpha filtration values over the full Delaunay skeleton, keyed by sorted
// vertex tuple per dimension (1, 2 and 3).
struct AlphaSkeleton {
    std::map<std::vector<int>, double> edges, triangles, tets;
    int n_vertices = 0;
};

Eigen::Vector3d circumcenter_affine(const std::vector<Eigen::Vector3d>& pts) {
    const int k = static_cast<int>(pts.size()) - 1;
    Eigen::MatrixXd U(k, 3);
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) {
        Eigen::Vector3d u = pts[i + 1] - pts[0];
        U.row(i) = u.transpose();
        rhs(i) = 0.5 * u.squaredNorm();
    }
    Eigen::MatrixXd G = U * U.transpose();
    Eigen::VectorXd lam = Eigen::FullPivLU<Eigen::MatrixXd>(G).solve(rhs);
    return pts[0] + U.transpose() * lam;
}

AlphaSkeleton alpha_skeleton(const PointCloud& cloud) {
    auto tets = delaunay_tetrahedra(cloud);
    const auto& pts = cloud.points;

    AlphaSkeleton sk;
    sk.n_vertices = static_cast<int>(pts.size());
    std::map<std::vector<int>, std::vector<const std::vector<int>*>> cofaces2,
        cofaces1;

    for (const auto& t : tets) {
        std::vector<int> tv(t.begin(), t.end());
        sk.tets[tv] =
            circumradius({pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]});
    }
    for (const auto& [tv, a] : sk.tets) {
        (void)a;
        for (auto& f : facets_of(tv)) {
            sk.triangles.emplace(f, -1.0);
            cofaces2[f].push_back(&tv);
        }
    }
    for (const auto& [fv, a] : sk.triangles) {
        (void)a;
        for (auto& e : facets_of(fv)) {
            sk.edges.emplace(e, -1.0);
            cofaces1[e].push_back(&fv);
        }
    }

    auto opposite = [](const std::vector<int>& coface,
                       const std::vector<int>& face) {
        std::vector<int> rest;
        std::set_difference(coface.begin(), coface.end(), face.begin(),
                            face.end(), std::back_inserter(rest));
        return rest.front();
    };

    // Gabriel rule, top down: a simplex whose smallest enclosing sphere is
    // empty of the opposite vertices of its cofaces enters at its own
    // circumradius, otherwise it inherits the smallest coface value.
    for (auto& [fv, a] : sk.triangles) {
        Eigen::Vector3d c =
            circumcenter_affine({pts[fv[0]], pts[fv[1]], pts[fv[2]]});
        double r2 = (c - pts[fv[0]]).squaredNorm();
        bool gabriel = true;
        double inherited = std::numeric_limits<double>::infinity();
        for (const auto* cf : cofaces2[fv]) {
            inherited = std::min(inherited, sk.tets[*cf]);
            if ((pts[opposite(*cf, fv)] - c).squaredNorm() < r2) gabriel = false;
        }
        a = gabriel ? std::sqrt(r2) : inherited;
    }
    for (auto& [ev, a] : sk.edges) {
        Eigen::Vector3d c = 0.5 * (pts[ev[0]] + pts[ev[1]]);
        double r2 = (c - pts[ev[0]]).squaredNorm();
        bool gabriel = true;
        double inherited = std::numeric_limits<double>::infinity();
        for (const auto* cf : cofaces1[ev]) {
            inherited = std::min(inherited, sk.triangles[*cf]);
            if ((pts[opposite(*cf, ev)] - c).squaredNorm() < r2) gabriel = false;
        }
        a = gabriel ? std::sqrt(r2) : inherited;
    }

    // Defensive monotonicity clamp across face relations.
    for (auto& [fv, a] : sk.triangles)
        for (const auto& e : facets_of(fv)) a = std::max(a, sk.edges[e]);
    for (auto& [tv, a] : sk.tets)
        for (const auto& f : facets_of(tv)) a = std::max(a, sk.triangles[f]);
    return sk;
}

SimplicialComplex assemble_alpha(const AlphaSkeleton& sk,
                                 const PointCloud& cloud, double threshold,
                                 int p_max) {
    SimplicialComplex K;
    K.kind = ComplexKind::Alpha;
    K.threshold = threshold;
    K.cloud = std::make_shared<PointCloud>(cloud);
    for (int i = 0; i < sk.n_vertices; ++i) K.add({{i}, 0.0});
    for (const auto& [ev, a] : sk.edges)
        if (a <= threshold) K.add({ev, a});
    if (p_max >= 2)
        for (const auto& [fv, a] : sk.triangles)
            if (a <= threshold) K.add({fv, a});
    if (p_max >= 3)
        for (const auto& [tv, a] : sk.tets)
            if (a <= threshold) K.add({tv, a});
    K.finalize();
    return K;
}

}  // namespace

SimplicialComplex build_alpha(const PointCloud& cloud, double threshold,
                              int p_max) {
    if (p_max < 1 || p_max > 3)
        throw ConfigError("alpha p_max must be in [1,3], got " +
                          std::to_string(p_max));
    if (!(threshold > 0.0))
        throw ConfigError("alpha threshold must be positive");
    return assemble_alpha(alpha_skeleton(cloud), cloud, threshold, p_max);
}

SimplicialComplex delaunay3d(const PointCloud& cloud) {
    auto sk = alpha_skeleton(cloud);
    double tmax = 0.0;
    for (const auto& [tv, a] : sk.tets) {
        (void)tv;
        tmax = std::max(tmax, a);
    }
    for (const auto& [ev, a] : sk.edges) {
        (void)ev;
        tmax = std::max(tmax, a);
    }
    return assemble_alpha(sk, cloud, tmax, 3);
}

PointCloud jitter_cloud(const PointCloud& cloud, double sigma,
                        std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ConfigError("jitter sigma must be finite and non-negative");
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    PointCloud out = cloud;
    for (auto& p : out.points) {
        for (int k = 0; k < 3; ++k) {
            // Box-Muller, cosine branch only, for cross-platform determinism.
            double u1 = uniform(), u2 = uniform();
            p[k] += sigma * std::sqrt(-2.0 * std::log1p(-u1)) *
                    std::cos(2.0 * M_PI * u2);
        }
    }
    return out;
}

}  // namespace topsim
