#include "topsim/predicates.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdlib>

namespace topsim::predicates {

namespace {

using Rat = boost::multiprecision::cpp_rational;

// Forward error bounds for the stage-A filters, after Shewchuk's "Adaptive
// Precision Floating-Point Arithmetic and Fast Robust Geometric Predicates".
constexpr double kO3dErrBound = 7.7715611723760958e-16;   // (7 + 56 eps) eps
constexpr double kIspErrBound = 1.7763568394002532e-15;   // (16 + 224 eps) eps
constexpr double kO2dErrBound = 3.3306690738754716e-16;   // (3 + 16 eps) eps
constexpr double kIccErrBound = 1.1102230246251577e-15;   // (10 + 96 eps) eps

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }
int sign_of(const Rat& x) { return x.sign(); }

template <typename T>
T orient3d_det(T ax, T ay, T az, T bx, T by, T bz, T cx, T cy, T cz, T dx, T dy,
               T dz) {
    T bax = bx - ax, bay = by - ay, baz = bz - az;
    T cax = cx - ax, cay = cy - ay, caz = cz - az;
    T dax = dx - ax, day = dy - ay, daz = dz - az;
    return bax * (cay * daz - caz * day) + bay * (caz * dax - cax * daz) +
           baz * (cax * day - cay * dax);
}

template <typename T>
T orient2d_det(T ax, T ay, T bx, T by, T cx, T cy) {
    return (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
}

template <typename T>
T incircle2d_det(T ax, T ay, T bx, T by, T cx, T cy, T dx, T dy) {
    T adx = ax - dx, ady = ay - dy;
    T bdx = bx - dx, bdy = by - dy;
    T cdx = cx - dx, cdy = cy - dy;
    T alift = adx * adx + ady * ady;
    T blift = bdx * bdx + bdy * bdy;
    T clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
           clift * (adx * bdy - bdx * ady);
}

// Lifted 4x4 determinant for the sphere test, rows (p - e, |p - e|^2).
template <typename T>
T insphere_det(T ax, T ay, T az, T bx, T by, T bz, T cx, T cy, T cz, T dx, T dy,
               T dz, T ex, T ey, T ez) {
    T aex = ax - ex, aey = ay - ey, aez = az - ez;
    T bex = bx - ex, bey = by - ey, bez = bz - ez;
    T cex = cx - ex, cey = cy - ey, cez = cz - ez;
    T dex = dx - ex, dey = dy - ey, dez = dz - ez;

    T ab = aex * bey - bex * aey;
    T bc = bex * cey - cex * bey;
    T cd = cex * dey - dex * cey;
    T da = dex * aey - aex * dey;
    T ac = aex * cey - cex * aey;
    T bd = bex * dey - dex * bey;

    T abc = aez * bc - bez * ac + cez * ab;
    T bcd = bez * cd - cez * bd + dez * bc;
    T cda = cez * da + dez * ac + aez * cd;
    T dab = dez * ab + aez * bd + bez * da;

    T alift = aex * aex + aey * aey + aez * aez;
    T blift = bex * bex + bey * bey + bez * bez;
    T clift = cex * cex + cey * cey + cez * cez;
    T dlift = dex * dex + dey * dey + dez * dez;

    return (dlift * abc - clift * dab) + (blift * cda - alift * bcd);
}

int exact_orient3d(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                   const Eigen::Vector3d& c, const Eigen::Vector3d& d) {
    return sign_of(orient3d_det<Rat>(a.x(), a.y(), a.z(), b.x(), b.y(), b.z(),
                                     c.x(), c.y(), c.z(), d.x(), d.y(), d.z()));
}

}  // namespace

int orient3d(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
             const Eigen::Vector3d& c, const Eigen::Vector3d& d) {
    double bax = b.x() - a.x(), bay = b.y() - a.y(), baz = b.z() - a.z();
    double cax = c.x() - a.x(), cay = c.y() - a.y(), caz = c.z() - a.z();
    double dax = d.x() - a.x(), day = d.y() - a.y(), daz = d.z() - a.z();

    double det = bax * (cay * daz - caz * day) + bay * (caz * dax - cax * daz) +
                 baz * (cax * day - cay * dax);
    double permanent =
        std::fabs(bax) * (std::fabs(cay * daz) + std::fabs(caz * day)) +
        std::fabs(bay) * (std::fabs(caz * dax) + std::fabs(cax * daz)) +
        std::fabs(baz) * (std::fabs(cax * day) + std::fabs(cay * dax));
    double errbound = kO3dErrBound * permanent;
    if (det > errbound || -det > errbound) return sign_of(det);
    return exact_orient3d(a, b, c, d);
}

int insphere(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
             const Eigen::Vector3d& c, const Eigen::Vector3d& d,
             const Eigen::Vector3d& e) {
    double aex = a.x() - e.x(), aey = a.y() - e.y(), aez = a.z() - e.z();
    double bex = b.x() - e.x(), bey = b.y() - e.y(), bez = b.z() - e.z();
    double cex = c.x() - e.x(), cey = c.y() - e.y(), cez = c.z() - e.z();
    double dex = d.x() - e.x(), dey = d.y() - e.y(), dez = d.z() - e.z();

    double ab = aex * bey - bex * aey;
    double bc = bex * cey - cex * bey;
    double cd = cex * dey - dex * cey;
    double da = dex * aey - aex * dey;
    double ac = aex * cey - cex * aey;
    double bd = bex * dey - dex * bey;

    double abc = aez * bc - bez * ac + cez * ab;
    double bcd = bez * cd - cez * bd + dez * bc;
    double cda = cez * da + dez * ac + aez * cd;
    double dab = dez * ab + aez * bd + bez * da;

    double alift = aex * aex + aey * aey + aez * aez;
    double blift = bex * bex + bey * bey + bez * bez;
    double clift = cex * cex + cey * cey + cez * cez;
    double dlift = dex * dex + dey * dey + dez * dez;

    double det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

    double aezp = std::fabs(aez), bezp = std::fabs(bez);
    double cezp = std::fabs(cez), dezp = std::fabs(dez);
    double axby = std::fabs(aex * bey), bxay = std::fabs(bex * aey);
    double bxcy = std::fabs(bex * cey), cxby = std::fabs(cex * bey);
    double cxdy = std::fabs(cex * dey), dxcy = std::fabs(dex * cey);
    double dxay = std::fabs(dex * aey), axdy = std::fabs(aex * dey);
    double axcy = std::fabs(aex * cey), cxay = std::fabs(cex * aey);
    double bxdy = std::fabs(bex * dey), dxby = std::fabs(dex * bey);

    double permanent =
        ((cxdy + dxcy) * bezp + (dxby + bxdy) * cezp + (bxcy + cxby) * dezp) * alift +
        ((dxay + axdy) * cezp + (axcy + cxay) * dezp + (cxdy + dxcy) * aezp) * blift +
        ((axby + bxay) * dezp + (bxdy + dxby) * aezp + (dxay + axdy) * bezp) * clift +
        ((bxcy + cxby) * aezp + (cxay + axcy) * bezp + (axby + bxay) * cezp) * dlift;
    double errbound = kIspErrBound * permanent;
    // The lifted determinant is negative when e is inside the circumsphere of a
    // positively oriented tetrahedron, hence the sign flip.
    if (det > errbound || -det > errbound) return -sign_of(det);

    Rat exact = insphere_det<Rat>(a.x(), a.y(), a.z(), b.x(), b.y(), b.z(), c.x(),
                                  c.y(), c.z(), d.x(), d.y(), d.z(), e.x(), e.y(),
                                  e.z());
    return -sign_of(exact);
}

int incircle_coplanar(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      const Eigen::Vector3d& c, const Eigen::Vector3d& d) {
    // Project along the dominant axis of the (approximate) plane normal; the
    // composed sign incircle * orient2d is invariant under the choice as long
    // as the projection is injective on the plane, which the exact fallback
    // re-checks with an exactly computed normal.
    Eigen::Vector3d n = (b - a).cross(c - a);
    int axis = 0;
    if (std::fabs(n.y()) > std::fabs(n.x())) axis = 1;
    if (std::fabs(n.z()) > std::fabs(n[axis])) axis = 2;
    int u = (axis + 1) % 3, v = (axis + 2) % 3;

    double o2 = orient2d_det<double>(a[u], a[v], b[u], b[v], c[u], c[v]);
    double o2perm = std::fabs((a[u] - c[u]) * (b[v] - c[v])) +
                    std::fabs((a[v] - c[v]) * (b[u] - c[u]));
    bool o2ok = o2 > kO2dErrBound * o2perm || -o2 > kO2dErrBound * o2perm;

    double ic = incircle2d_det<double>(a[u], a[v], b[u], b[v], c[u], c[v], d[u], d[v]);
    double adx = a[u] - d[u], ady = a[v] - d[v];
    double bdx = b[u] - d[u], bdy = b[v] - d[v];
    double cdx = c[u] - d[u], cdy = c[v] - d[v];
    double icperm =
        (std::fabs(bdx * cdy) + std::fabs(cdx * bdy)) * (adx * adx + ady * ady) +
        (std::fabs(cdx * ady) + std::fabs(adx * cdy)) * (bdx * bdx + bdy * bdy) +
        (std::fabs(adx * bdy) + std::fabs(bdx * ady)) * (cdx * cdx + cdy * cdy);
    bool icok = ic > kIccErrBound * icperm || -ic > kIccErrBound * icperm;

    if (o2ok && icok) return sign_of(ic) * sign_of(o2);

    // Exact fallback: recompute the normal exactly to select a valid axis.
    Rat nx = (Rat(b.y()) - Rat(a.y())) * (Rat(c.z()) - Rat(a.z())) -
             (Rat(b.z()) - Rat(a.z())) * (Rat(c.y()) - Rat(a.y()));
    Rat ny = (Rat(b.z()) - Rat(a.z())) * (Rat(c.x()) - Rat(a.x())) -
             (Rat(b.x()) - Rat(a.x())) * (Rat(c.z()) - Rat(a.z()));
    Rat nz = (Rat(b.x()) - Rat(a.x())) * (Rat(c.y()) - Rat(a.y())) -
             (Rat(b.y()) - Rat(a.y())) * (Rat(c.x()) - Rat(a.x()));
    Rat nabs[3] = {abs(nx), abs(ny), abs(nz)};
    axis = 0;
    if (nabs[1] > nabs[0]) axis = 1;
    if (nabs[2] > nabs[axis]) axis = 2;
    if (nabs[axis] == 0) return 0;  // a, b, c collinear: no circumcircle
    u = (axis + 1) % 3;
    v = (axis + 2) % 3;

    Rat eo2 = orient2d_det<Rat>(a[u], a[v], b[u], b[v], c[u], c[v]);
    Rat eic = incircle2d_det<Rat>(a[u], a[v], b[u], b[v], c[u], c[v], d[u], d[v]);
    return sign_of(eic) * sign_of(eo2);
}

bool collinear(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
               const Eigen::Vector3d& c) {
    Rat ux = Rat(b.x()) - Rat(a.x()), uy = Rat(b.y()) - Rat(a.y()),
        uz = Rat(b.z()) - Rat(a.z());
    Rat vx = Rat(c.x()) - Rat(a.x()), vy = Rat(c.y()) - Rat(a.y()),
        vz = Rat(c.z()) - Rat(a.z());
    return uy * vz == uz * vy && uz * vx == ux * vz && ux * vy == uy * vx;
}

}  // namespace topsim::predicates
