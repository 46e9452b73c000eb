#ifndef KRYDOM_SUBSPACE_HPP
#define KRYDOM_SUBSPACE_HPP

#include "krydom/matrix_core.hpp"

namespace krydom {

/**
 * Principal angles between two subspaces, non-decreasing in [0, pi/2].
 * Cosines come from the singular values of S^T T; angles below pi/4 are
 * refined through the sine route (singular values of (I - T T^T) S) which
 * keeps small angles fully accurate.
 */
struct PrincipalAngles {
    Vector angles;   // non-decreasing
    Vector cosines;  // cos(angles), non-increasing
    Vector sines;    // sin(angles), non-decreasing

    Index count() const { return angles.size(); }
    double largest() const { return angles.size() ? angles(angles.size() - 1) : 0.0; }
};

/// Paired orthonormal systems u_i in S, v_i in T with <u_i, v_j> = delta_ij cos(theta_j).
struct PrincipalVectorPair {
    OrthonormalBasis uBasis;  // in S
    OrthonormalBasis vBasis;  // in T
    PrincipalAngles angles;
};

PrincipalVectorPair principal_angles(const OrthonormalBasis& S, const OrthonormalBasis& T);

/**
 * Scalar sin/tan distance measures between subspaces. Requires
 * dim S <= dim T (the roles are not symmetric); the sin norms then equal
 * ||(I - T T^T) S S^T|| in the spectral and Frobenius norms.
 *
 * tanInfinite is set when some angle reaches pi/2 within 1e-12; the tan
 * norms are +inf in that case.
 */
struct SinTanNorms {
    double sin2 = 0.0;
    double sinF = 0.0;
    double tan2 = 0.0;
    double tanF = 0.0;
    bool tanInfinite = false;
};

SinTanNorms sin_tan_theta_norms(const OrthonormalBasis& S, const OrthonormalBasis& T);

}  // namespace krydom

#endif
