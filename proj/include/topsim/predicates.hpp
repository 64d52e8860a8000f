#pragma once

#include <Eigen/Dense>

namespace topsim::predicates {

// Robust orientation / sphere-membership tests.  Each predicate is evaluated in
// double precision with a forward static error bound; when the filter cannot
// certify the sign, the computation is repeated in exact rational arithmetic.
// Return value is the sign (-1, 0, +1) of the underlying determinant.

// Sign of det for orientation of d with respect to plane (a,b,c).
// Positive when d lies on the side making (a,b,c,d) positively oriented.
int orient3d(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
             const Eigen::Vector3d& c, const Eigen::Vector3d& d);

// Sphere test: sign > 0 iff e is strictly inside the circumsphere of the
// positively oriented tetrahedron (a,b,c,d).
int insphere(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
             const Eigen::Vector3d& c, const Eigen::Vector3d& d,
             const Eigen::Vector3d& e);

// Coplanar circle test: sign > 0 iff d lies strictly inside the circle through
// (a,b,c), all four points being coplanar; the triangle (a,b,c) may have either
// orientation (the result is normalized accordingly).
int incircle_coplanar(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      const Eigen::Vector3d& c, const Eigen::Vector3d& d);

// True when a, b, c are exactly collinear (always evaluated exactly).
bool collinear(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
               const Eigen::Vector3d& c);

}  // namespace topsim::predicates
