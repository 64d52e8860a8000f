#include "topsim/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topsim/modular_rank.hpp"

namespace topsim {

namespace {

constexpr int kDenseLimit = 4000;
constexpr double kSignEps = 1e-12;

double default_tol(double lambda_max) {
    return 1e-8 * std::max(1.0, lambda_max);
}

void sign_fix(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::fabs(v[i]) > kSignEps) {
            if (v[i] < 0) v = -v;
            return;
        }
    }
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
    }
    return false;
}

void check_dimension(const SimplicialComplex& K, int p, const char* who) {
    (void)K;
    if (p < 0 || p > SimplicialComplex::kMaxDim)
        throw ConfigError(std::string(who) + ": dimension p=" +
                          std::to_string(p) + " out of range [0," +
                          std::to_string(SimplicialComplex::kMaxDim) + "]");
}

// Number of p-simplices, zero when the dimension is absent.
int dim_count(const SimplicialComplex& K, int p) {
    return static_cast<int>(K.count(p));
}

int rank_of_boundary(const SimplicialComplex& K, int p) {
    if (p < 1 || p > SimplicialComplex::kMaxDim || dim_count(K, p) == 0)
        return 0;
    return rank_mod_p(boundary_matrix(K, p).entries);
}

int betti_rank_route(const SimplicialComplex& K, int p) {
    return dim_count(K, p) - rank_of_boundary(K, p) - rank_of_boundary(K, p + 1);
}

}  // namespace

BoundaryMatrix boundary_matrix(const SimplicialComplex& K, int p) {
    if (p < 1 || p > K.p_max)
        throw ConfigError("boundary_matrix: p=" + std::to_string(p) +
                          " out of range [1," + std::to_string(K.p_max) + "]");
    const auto& cols = K.simplices(p);
    const int n_rows = dim_count(K, p - 1);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(cols.size() * (p + 1));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto& vs = cols[j].vertices;
        std::vector<int> face(vs.size() - 1);
        for (std::size_t k = 0; k < vs.size(); ++k) {
            // Face obtained by deleting the k-th vertex carries sign (-1)^k.
            face.clear();
            for (std::size_t i = 0; i < vs.size(); ++i)
                if (i != k) face.push_back(vs[i]);
            int row = K.index_of(face);
            if (row < 0)
                throw ConsistencyError("boundary_matrix: missing face of simplex");
            trip.emplace_back(row, static_cast<int>(j), k % 2 == 0 ? 1.0 : -1.0);
        }
    }
    BoundaryMatrix B;
    B.p = p;
    B.entries.resize(n_rows, static_cast<int>(cols.size()));
    B.entries.setFromTriplets(trip.begin(), trip.end());
    return B;
}

Laplacian hodge_laplacian(const SimplicialComplex& K, int p) {
    check_dimension(K, p, "hodge_laplacian");
    const int n = dim_count(K, p);
    if (n > kDenseLimit)
        throw ConfigError("hodge_laplacian: n_p=" + std::to_string(n) +
                          " exceeds the dense solver limit of " +
                          std::to_string(kDenseLimit));

    Laplacian L;
    L.p = p;
    L.matrix = Eigen::MatrixXd::Zero(n, n);
    if (n == 0) return L;

    bool has_down = p >= 1 && dim_count(K, p - 1) > 0;
    bool has_up = p + 1 <= K.p_max && dim_count(K, p + 1) > 0;
    if (has_down) {
        auto Bp = boundary_matrix(K, p).entries;
        L.matrix += Eigen::MatrixXd(Eigen::SparseMatrix<double>(
            Bp.transpose() * Bp));
        if (has_up) {
            // Composition law: entries of B_p B_{p+1} are small integer sums,
            // exact in double arithmetic.
            auto Bq = boundary_matrix(K, p + 1).entries;
            Eigen::SparseMatrix<double> comp = Bp * Bq;
            for (int k = 0; k < comp.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(comp, k); it;
                     ++it)
                    if (it.value() != 0.0)
                        throw ConsistencyError(
                            "boundary composition B_p * B_{p+1} != 0");
        }
    }
    if (has_up) {
        auto Bq = boundary_matrix(K, p + 1).entries;
        L.matrix += Eigen::MatrixXd(Eigen::SparseMatrix<double>(
            Bq * Bq.transpose()));
    }
    return L;
}

Laplacian adjacency_laplacian(const SimplicialComplex& K, int p) {
    check_dimension(K, p, "adjacency_laplacian");
    const int n = dim_count(K, p);
    if (n > kDenseLimit)
        throw ConfigError("adjacency_laplacian: n_p exceeds the dense limit");

    Laplacian L;
    L.p = p;
    L.matrix = Eigen::MatrixXd::Zero(n, n);
    const auto& simp = K.simplices(p);

    if (p == 0) {
        for (const auto& e : K.simplices(1)) {
            int i = e.vertices[0], j = e.vertices[1];
            L.matrix(i, i) += 1.0;
            L.matrix(j, j) += 1.0;
            L.matrix(i, j) -= 1.0;
            L.matrix(j, i) -= 1.0;
        }
        return L;
    }

    for (int i = 0; i < n; ++i)
        L.matrix(i, i) = upper_degree(K, simp[i]) + p + 1;

    std::vector<int> inter, uni;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& a = simp[i].vertices;
            const auto& b = simp[j].vertices;
            inter.clear();
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(inter));
            if (static_cast<int>(inter.size()) != p) continue;  // not lower adjacent
            uni.clear();
            std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                           std::back_inserter(uni));
            if (K.contains(uni)) continue;  // upper adjacent: entry stays 0

            // Relative orientation across the shared (p-1)-face: (-1)^{k_i+k_j}
            // where k is the position of the non-shared vertex.
            auto odd_pos = [](const std::vector<int>& s,
                              const std::vector<int>& shared) {
                for (std::size_t k = 0; k < s.size(); ++k)
                    if (!std::binary_search(shared.begin(), shared.end(), s[k]))
                        return k % 2 == 1;
                throw ConsistencyError("adjacency_laplacian: bad intersection");
            };
            double sgn = (odd_pos(a, inter) == odd_pos(b, inter)) ? 1.0 : -1.0;
            L.matrix(i, j) = sgn;
            L.matrix(j, i) = sgn;
        }
    }
    return L;
}

Spectrum spectrum(const Laplacian& L) {
    const Eigen::Index n = L.matrix.rows();
    if (L.matrix.cols() != n)
        throw ConsistencyError("spectrum: non-square matrix");
    if (n > 0) {
        double asym = (L.matrix - L.matrix.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-12)
            throw ConsistencyError("spectrum: matrix asymmetric beyond 1e-12 (" +
                                   std::to_string(asym) + ")");
    }

    Spectrum S;
    if (n == 0) {
        S.eigenvalues.resize(0);
        S.eigenvectors.resize(0, 0);
        return S;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L.matrix);
    if (es.info() != Eigen::Success)
        throw ConsistencyError("spectrum: eigensolver did not converge");
    S.eigenvalues = es.eigenvalues();
    S.eigenvectors = es.eigenvectors();

    double lmax = std::max(0.0, S.eigenvalues[n - 1]);
    if (S.eigenvalues[0] < -1e-9 * std::max(1.0, lmax))
        throw ConsistencyError("spectrum: Laplacian not positive semidefinite");

    double tol = default_tol(lmax);
    auto check_col = [&](Eigen::Index i) {
        double resid = (L.matrix * S.eigenvectors.col(i) -
                        S.eigenvalues[i] * S.eigenvectors.col(i))
                           .norm();
        if (resid > tol)
            throw ConsistencyError("spectrum: eigenpair residual " +
                                   std::to_string(resid) + " exceeds tolerance");
    };
    if (n <= 500) {
        for (Eigen::Index i = 0; i < n; ++i) check_col(i);
        double ortho =
            (S.eigenvectors.transpose() * S.eigenvectors -
             Eigen::MatrixXd::Identity(n, n))
                .cwiseAbs()
                .maxCoeff();
        if (ortho > 1e-8)
            throw ConsistencyError("spectrum: eigenvectors not orthonormal");
    } else {
        check_col(0);
        check_col(n - 1);
    }
    return S;
}

GeneratorSet harmonic_generators(const SimplicialComplex& K, int p, double tol) {
    check_dimension(K, p, "harmonic_generators");
    GeneratorSet G;
    G.p = p;
    for (const auto& s : K.simplices(p)) G.simplex_order.push_back(s.vertices);

    const int n = dim_count(K, p);
    if (n == 0) {
        G.tolerance = tol > 0 ? tol : default_tol(0.0);
        return G;
    }

    Laplacian L = hodge_laplacian(K, p);
    Spectrum S = spectrum(L);
    double lmax = std::max(0.0, S.eigenvalues[n - 1]);
    double tau = tol > 0 ? tol : default_tol(lmax);
    G.tolerance = tau;

    std::vector<Eigen::VectorXd> kernel;
    for (int i = 0; i < n; ++i) {
        double lam = S.eigenvalues[i];
        if (lam < tau) {
            kernel.push_back(S.eigenvectors.col(i));
            G.kernel_eigenvalues.push_back(lam);
        }
        if (lam >= tau / 10 && lam <= 10 * tau) G.gap_warning = true;
    }
    if (G.gap_warning)
        warn("harmonic_generators: eigenvalue within [tol/10, 10*tol]; kernel "
             "dimension may be tolerance-sensitive (p=" +
             std::to_string(p) + ")");

    // Deterministic gauge: sign-fix, lexicographic order, re-orthogonalize,
    // re-apply the sign rule.
    for (auto& v : kernel) sign_fix(v);
    std::sort(kernel.begin(), kernel.end(), lex_less);
    for (std::size_t k = 0; k < kernel.size(); ++k) {
        Eigen::VectorXd v = kernel[k];
        for (std::size_t j = 0; j < k; ++j)
            v -= G.vectors[j].dot(v) * G.vectors[j];
        double norm = v.norm();
        if (norm < 0.5)
            throw ConsistencyError(
                "harmonic_generators: kernel basis degenerated during "
                "re-orthogonalization");
        v /= norm;
        sign_fix(v);
        double resid = (L.matrix * v).norm();
        if (resid > tau)
            throw ConsistencyError("harmonic_generators: ||L v|| = " +
                                   std::to_string(resid) + " exceeds tolerance");
        G.vectors.push_back(std::move(v));
    }

    int beta = betti_rank_route(K, p);
    if (static_cast<int>(G.vectors.size()) != beta)
        throw ConsistencyError(
            "harmonic_generators: spectral kernel dimension " +
            std::to_string(G.vectors.size()) + " != exact Betti number " +
            std::to_string(beta) + " (rank value is authoritative; tolerance " +
            std::to_string(tau) + " is unsuitable)");
    return G;
}

int betti(const SimplicialComplex& K, int p) {
    check_dimension(K, p, "betti");
    int exact = betti_rank_route(K, p);

    const int n = dim_count(K, p);
    if (n > 0) {
        Spectrum S = spectrum(hodge_laplacian(K, p));
        double tau = default_tol(std::max(0.0, S.eigenvalues[n - 1]));
        int spectral = 0;
        for (int i = 0; i < n; ++i)
            if (S.eigenvalues[i] < tau) ++spectral;
        if (spectral != exact)
            throw ConsistencyError(
                "betti: spectral kernel dimension " + std::to_string(spectral) +
                " != exact rank value " + std::to_string(exact) +
                " (rank value is authoritative; bad tolerance)");
    } else if (exact != 0) {
        throw ConsistencyError("betti: empty dimension with nonzero rank value");
    }
    return exact;
}

Eigen::VectorXd fiedler_vector(const SimplicialComplex& K) {
    int b0 = betti(K, 0);
    if (b0 != 1)
        throw DataError("fiedler_vector: complex is disconnected (beta_0 = " +
                        std::to_string(b0) + ")");

    Laplacian L0 = hodge_laplacian(K, 0);
    Spectrum S = spectrum(L0);
    const int n = static_cast<int>(S.eigenvalues.size());
    double tau = default_tol(std::max(0.0, S.eigenvalues[n - 1]));
    int idx = -1;
    for (int i = 0; i < n; ++i) {
        if (S.eigenvalues[i] > tau) {
            idx = i;
            break;
        }
    }
    if (idx < 0)
        throw DataError("fiedler_vector: no eigenvalue above tolerance");
    if (idx + 1 < n && S.eigenvalues[idx + 1] - S.eigenvalues[idx] <=
                           1e-9 * std::max(1.0, S.eigenvalues[idx]))
        warn("fiedler_vector: algebraic connectivity is degenerate "
             "(multiplicity > 1); the returned vector is basis-dependent");

    Eigen::VectorXd v = S.eigenvectors.col(idx);
    sign_fix(v);
    return v;
}

}  // namespace topsim
