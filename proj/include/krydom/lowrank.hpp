#ifndef KRYDOM_LOWRANK_HPP
#define KRYDOM_LOWRANK_HPP

#include <vector>

#include "krydom/bounds.hpp"
#include "krydom/matrix_core.hpp"

namespace krydom {

enum class NormSelector { Spectral, Frobenius };

struct ApproxError {
    double err2 = 0.0;
    double errF = 0.0;
};

/// ||A - U U^T A|| in spectral and Frobenius norms.
ApproxError approx_error(const Matrix& A, const OrthonormalBasis& U);

/**
 * Output of the block power proto-algorithm: an m x h isometry uHat whose
 * column prefixes approximate the best rank-i projections. The error arrays
 * hold ||A - Uhat_i Uhat_i^T A|| and ||A - A_i|| for prefix sizes i = 1..h
 * (index i-1). The certificate fields are filled by lowrank_certificate.
 */
struct LowRankResult {
    Matrix uHat;  // m x h, orthonormal columns
    std::vector<double> errors2, errorsF;
    std::vector<double> optErrors2, optErrorsF;
    Index krylovDim = 0;
    int powerParameter = 0;

    // populated on the certified path
    bool certified = false;
    bool applicable = false;
    std::vector<double> deltas;
    double conditionLHS = 0.0;
    double theta0 = 0.0;

    std::string to_json(bool includeUHat = true) const;
};

/**
 * Block power proto-algorithm: orthonormalize the order-ell Krylov block of
 * (A, X), compress A onto it, take the top-h left singular directions of the
 * compression. Requires the Krylov block to reach numerical rank >= h
 * (InsufficientKrylovRank carries the achieved dimension otherwise).
 */
LowRankResult proto_algorithm(const Matrix& A, const Matrix& X, Index h, int ell,
                              double rankTol = kDefaultKrylovTol);

/**
 * Certified run: evaluates the condition value
 *   4 Delta(X,q,j)_2 sigma_{j+1}/sigma_j + Delta*(Y_q,t,k)_2 sigma_{k+1}/sigma_k,
 * declares the certificate applicable when it is at most sin(theta0), runs
 * the proto-algorithm at power q+t+1 and attaches per-prefix excess bounds
 *   delta_i(theta0) = ||A - A_i||_2 * [same expression in Frobenius] / cos(theta0).
 * theta0 = pi/4 gives the canonical sqrt(2)-scaled variant.
 *
 * The embedded certificate records lhs = max_i(error_i - optError_i - delta_i)
 * against rhs = 0, so the usual soundness predicate applies.
 */
struct LowRankCertificate {
    BoundCertificate cert;  // theoremId T37
    LowRankResult result;
};

LowRankCertificate lowrank_certificate(const SVDFactorization& svd, const Matrix& X, Index h,
                                       int q, int t, double theta0 = 0.78539816339744830962,
                                       double clusterTol = kDefaultClusterTol,
                                       double rankTol = kDefaultRankTol);

/**
 * Best rank-i approximation of A restricted to the range of C, computed as
 * Q (Q^T A)_i for Q spanning R(C). Optimal in the Frobenius norm among
 * range-restricted rank-i candidates; for the spectral selector the same
 * candidate is returned, which still dominates C C^+ A per the projection
 * optimality inequality.
 */
Matrix best_rank_i_from_range(const Matrix& C, const Matrix& A, Index i,
                              NormSelector xi = NormSelector::Frobenius,
                              double rankTol = kDefaultRankTol);

}  // namespace krydom

#endif
