#pragma once

#include <array>
#include <vector>

#include "topsim/ingest.hpp"
#include "topsim/simplicial_complex.hpp"

namespace topsim {

// One tetrahedron of the Delaunay triangulation, vertices sorted ascending.
using Tetra = std::array<int, 4>;

// 3D Delaunay tetrahedralization of a point cloud via incremental insertion
// with robust predicates.  Requires at least 5 points not all coplanar;
// cospherical degeneracies are resolved deterministically, and every returned
// tetrahedron is re-certified against the empty-circumsphere property
// afterwards.  Throws DataError when the input is too degenerate to
// triangulate.
std::vector<Tetra> delaunay_tetrahedra(const PointCloud& cloud);

// The full Delaunay complex: tetrahedra plus all faces, with alpha filtration
// values attached (so that build_alpha at a large enough threshold returns
// exactly this complex).
SimplicialComplex delaunay3d(const PointCloud& cloud);

// Circumradius of the simplex spanned by the given vertex positions (2 to 4
// points: half-distance, triangle circumradius, tetrahedron circumradius).
double circumradius(const std::vector<Eigen::Vector3d>& pts);

// Alpha complex: the Delaunay subcomplex of simplices with filtration value at
// most `threshold`.  Filtration values follow the radius convention: an edge
// enters at half the distance between its endpoints, and a Gabriel simplex at
// its circumradius; non-Gabriel simplices inherit the smallest filtration
// value among their cofaces.
SimplicialComplex build_alpha(const PointCloud& cloud, double threshold,
                              int p_max = 3);

// Adds centered Gaussian noise with standard deviation sigma to every
// coordinate, deterministically in `seed`.  Used to break ties in symmetric
// inputs before Delaunay-based constructions.
PointCloud jitter_cloud(const PointCloud& cloud, double sigma,
                        std::uint64_t seed);

// Brute-force certificate: checks that no point lies strictly inside the
// circumsphere of any tetrahedron.  Returns the number of violations.
int verify_delaunay(const PointCloud& cloud, const std::vector<Tetra>& tets);

}  // namespace topsim
