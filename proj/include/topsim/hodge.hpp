#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <vector>

#include "topsim/simplicial_complex.hpp"

namespace topsim {

// Signed incidence matrix from p-simplices to their (p-1)-faces; entries are
// integers in {-1, 0, +1} stored as doubles (all arithmetic on them stays
// exact).  Row/column order follows the complex's per-dimension ordering.
struct BoundaryMatrix {
    int p = 0;
    Eigen::SparseMatrix<double> entries;  // n_{p-1} x n_p
};

struct Laplacian {
    int p = 0;
    Eigen::MatrixXd matrix;  // dense symmetric n_p x n_p
};

struct Spectrum {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // orthonormal columns, aligned
};

// Orthonormal harmonic basis of ker(L_p) at tolerance `tolerance`, sign-fixed
// and deterministically gauged; `vectors[k][i]` is the coefficient on the
// p-simplex with index i.
struct GeneratorSet {
    int p = 0;
    std::vector<Eigen::VectorXd> vectors;
    std::vector<std::vector<int>> simplex_order;  // vertex tuples, dim p
    double tolerance = 0.0;
    bool gap_warning = false;
    std::vector<double> kernel_eigenvalues;
};

BoundaryMatrix boundary_matrix(const SimplicialComplex& K, int p);

// L_0 = B_1 B_1^T;  L_p = B_p^T B_p + B_{p+1} B_{p+1}^T;  L_n = B_n^T B_n.
Laplacian hodge_laplacian(const SimplicialComplex& K, int p);

// The same operator assembled entry-by-entry from simplex adjacency relations
// without touching boundary matrices; serves as an independent cross-check.
Laplacian adjacency_laplacian(const SimplicialComplex& K, int p);

// Full symmetric eigendecomposition with residual/orthonormality validation
// (exhaustive validation for n <= 500, spot checks above).
Spectrum spectrum(const Laplacian& L);

// Default zero-eigenvalue tolerance 1e-8 * max(1, lambda_max), applied when
// tol <= 0.
GeneratorSet harmonic_generators(const SimplicialComplex& K, int p,
                                 double tol = 0.0);

// Betti number via the exact rank formula n_p - rank B_p - rank B_{p+1},
// cross-checked against the spectral kernel dimension; a mismatch throws
// ConsistencyError (the rank value is the authoritative one).
int betti(const SimplicialComplex& K, int p);

// Sign-fixed unit eigenvector of L_0 for the smallest eigenvalue above the
// zero tolerance; requires a connected complex.
Eigen::VectorXd fiedler_vector(const SimplicialComplex& K);

}  // namespace topsim
