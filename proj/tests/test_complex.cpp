#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "topsim/simplicial_complex.hpp"

using namespace topsim;

namespace {

PointCloud collinear_cloud() {
    PointCloud c;
    c.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    return c;
}

// Binomial coefficient, small arguments only.
std::size_t choose(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

}  // namespace

TEST_CASE("VR on collinear points: threshold 1.5 gives a path") {
    auto K = build_vr(collinear_cloud(), 1.5, 2);
    CHECK(K.count(0) == 3);
    CHECK(K.count(1) == 2);
    CHECK(K.count(2) == 0);
    CHECK(K.contains({0, 1}));
    CHECK(K.contains({1, 2}));
    CHECK_FALSE(K.contains({0, 2}));
}

TEST_CASE("VR on collinear points: threshold 2.0 fills the triangle") {
    auto K = build_vr(collinear_cloud(), 2.0, 2);
    CHECK(K.count(1) == 3);
    CHECK(K.count(2) == 1);
    CHECK(K.contains({0, 1, 2}));
    // Closed convention: the {0,2} edge sits exactly at the threshold.
    int e02 = K.index_of({0, 2});
    REQUIRE(e02 >= 0);
    CHECK(K.simplices(1)[e02].filtration == 2.0);
    // Triangle filtration = max edge length.
    CHECK(K.simplices(2)[0].filtration == 2.0);
}

TEST_CASE("VR below minimum distance keeps vertices only") {
    auto K = build_vr(collinear_cloud(), 0.5, 3);
    CHECK(K.count(0) == 3);
    CHECK(K.count(1) == 0);
    CHECK(K.total() == 3);
}

TEST_CASE("VR at diameter is the full skeleton") {
    std::mt19937_64 rng(7);
    auto cloud = oracle::random_cloud(rng, 7, 5.0);
    double diam = 0;
    for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j)
            diam = std::max(diam, (cloud.points[i] - cloud.points[j]).norm());
    for (int pmax = 1; pmax <= 3; ++pmax) {
        auto K = build_vr(cloud, diam, pmax);
        for (int d = 0; d <= pmax; ++d) CHECK(K.count(d) == choose(7, d + 1));
        CHECK(K.p_max == pmax);
    }
}

TEST_CASE("VR rejects bad parameters") {
    CHECK_THROWS_AS(build_vr(collinear_cloud(), 1.0, 0), ConfigError);
    CHECK_THROWS_AS(build_vr(collinear_cloud(), 1.0, 4), ConfigError);
    PointCloud empty;
    CHECK_THROWS_AS(build_vr(empty, 1.0, 2), DataError);
}

TEST_CASE("simplex ordering is lexicographic and stable") {
    std::mt19937_64 rng(21);
    auto cloud = oracle::random_cloud(rng, 9, 3.0);
    auto K = build_vr(cloud, 2.5, 2);
    for (int d = 0; d <= 2; ++d) {
        const auto& list = K.simplices(d);
        for (std::size_t i = 1; i < list.size(); ++i)
            CHECK(list[i - 1].vertices < list[i].vertices);
        for (std::size_t i = 0; i < list.size(); ++i)
            CHECK(K.index_of(list[i].vertices) == static_cast<int>(i));
    }
    // Deterministic rebuild.
    auto K2 = build_vr(cloud, 2.5, 2);
    for (int d = 0; d <= 2; ++d) {
        REQUIRE(K.count(d) == K2.count(d));
        for (std::size_t i = 0; i < K.count(d); ++i) {
            CHECK(K.simplices(d)[i].vertices == K2.simplices(d)[i].vertices);
            CHECK(K.simplices(d)[i].filtration ==
                  K2.simplices(d)[i].filtration);
        }
    }
}

TEST_CASE("downward closure and filtration monotonicity on random VR") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto cloud = oracle::random_cloud(rng, 8, 2.0);
        auto K = build_vr(cloud, 1.2, 3);
        for (int d = 1; d <= 3; ++d) {
            for (const auto& s : K.simplices(d)) {
                for (const auto& face : facets_of(s.vertices)) {
                    int idx = K.index_of(face);
                    REQUIRE(idx >= 0);
                    CHECK(K.simplices(d - 1)[idx].filtration <=
                          s.filtration + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("upper_degree matches the golden examples") {
    PointCloud tri;
    tri.points = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3) / 2, 0}};
    auto hollow = build_vr(tri, 1.0, 1);
    auto filled = build_vr(tri, 1.0, 2);
    REQUIRE(filled.count(2) == 1);

    Simplex edge;
    edge.vertices = {0, 1};
    CHECK(upper_degree(hollow, edge) == 0);
    CHECK(upper_degree(filled, edge) == 1);
    Simplex vertex;
    vertex.vertices = {0};
    CHECK(upper_degree(hollow, vertex) == 2);

    Simplex missing;
    missing.vertices = {0, 2, 5};
    CHECK_THROWS_AS(upper_degree(filled, missing), DataError);
}

TEST_CASE("facets_of deletes one vertex at a time in order") {
    auto faces = facets_of({2, 5, 9});
    REQUIRE(faces.size() == 3);
    CHECK(faces[0] == std::vector<int>{5, 9});
    CHECK(faces[1] == std::vector<int>{2, 9});
    CHECK(faces[2] == std::vector<int>{2, 5});
}

TEST_CASE("manual construction is checked at finalize") {
    SimplicialComplex K;
    Simplex v0, v1, e;
    v0.vertices = {0};
    v1.vertices = {1};
    e.vertices = {0, 1};

    SUBCASE("missing face fails") {
        K.add(v0);
        K.add(e);
        CHECK_THROWS_AS(K.finalize(), ConsistencyError);
    }
    SUBCASE("duplicate simplex fails") {
        K.add(v0);
        K.add(v0);
        CHECK_THROWS_AS(K.finalize(), ConsistencyError);
    }
    SUBCASE("negative filtration is rejected at add") {
        e.filtration = -1.0;
        CHECK_THROWS_AS(K.add(e), ConsistencyError);
    }
    SUBCASE("non-monotone filtration fails at finalize") {
        v1.filtration = 2.0;
        e.filtration = 1.0;
        K.add(v0);
        K.add(v1);
        K.add(e);
        CHECK_THROWS_AS(K.finalize(), ConsistencyError);
    }
    SUBCASE("unsorted vertices are rejected at add") {
        Simplex bad;
        bad.vertices = {3, 1};
        CHECK_THROWS_AS(K.add(bad), ConsistencyError);
    }
    SUBCASE("valid complex passes") {
        K.add(v0);
        K.add(v1);
        K.add(e);
        CHECK_NOTHROW(K.finalize());
        CHECK(K.total() == 3);
        CHECK(K.p_max == 1);
    }
}

TEST_CASE("complex kind string conversions") {
    CHECK(to_string(ComplexKind::VR) == "vr");
    CHECK(to_string(ComplexKind::Alpha) == "alpha");
    CHECK(complex_kind_from_string("vr") == ComplexKind::VR);
    CHECK(complex_kind_from_string("alpha") == ComplexKind::Alpha);
    CHECK_THROWS_AS(complex_kind_from_string("cech"), ConfigError);
}
