#ifndef KRYDOM_BOUNDS_HPP
#define KRYDOM_BOUNDS_HPP

#include <optional>
#include <string>
#include <vector>

#include "krydom/amplifier.hpp"
#include "krydom/krylov.hpp"
#include "krydom/matrix_core.hpp"
#include "krydom/spectrum.hpp"
#include "krydom/subspace.hpp"

namespace krydom {

enum class Side { Left, Right };

/**
 * An h-dimensional subspace spanned by singular vectors for the top h
 * singular values. Unique only when a gap exists at h; otherwise one member
 * of the continuum parametrized by the free cluster directions.
 */
struct DominantSubspace {
    Side side = Side::Left;
    OrthonormalBasis basis;
    Index h = 0;
};

/**
 * Constructive dominant-subspace witness: the fixed head block glued to the
 * cluster directions closest (by principal angles) to the target subspace.
 * With a gap at h the result is the unique dominant subspace regardless of
 * the target. No global optimality across the continuum is claimed.
 */
DominantSubspace best_dominant_subspace(const SVDFactorization& svd,
                                        const OrthonormalBasis& target, Index h, Side side,
                                        double clusterTol = kDefaultClusterTol);

struct HCompatibility {
    bool compatible = false;
    DominantSubspace witness;
    double marginAngle = 0.0;  // pi/2 minus the largest principal angle to R(X)
    Index rankXS = 0;          // numerical rank of X^T S for the witness S
};

/**
 * Decides whether some h-dimensional right dominant subspace S meets R(X) at
 * angles strictly below pi/2, via the rank test dim(X^T S) == h applied to
 * the constructed witness closest to R(X).
 */
HCompatibility is_h_compatible(const SVDFactorization& svd, const Matrix& X, Index h,
                               double rankTol = kDefaultRankTol,
                               double clusterTol = kDefaultClusterTol);

struct RawNorms {
    double n2 = 0.0;
    double nF = 0.0;
    Index headRank = 0;
};

/// ||tail^T W (head^T W)^+|| in spectral and Frobenius norms.
RawNorms raw_alignment_norms(const Matrix& head, const Matrix& tail, const Matrix& W,
                             double rankTol = kDefaultRankTol);

/// 2^((2*power+1) * min(sqrt(gamma), 1)).
double delta_denominator(int power, double gamma);

struct DeflationCoefficient {
    double delta2 = 0.0;
    double deltaF = 0.0;
    double raw2 = 0.0;
    double rawF = 0.0;
    bool omitted = false;  // index 0 or index == rank: the bound term is dropped
    double gamma = 0.0;    // meaningless when omitted
    int power = 0;
    Index index = 0;
};

/**
 * Convergence driver 4 * ||tail^T W (head^T W)^+|| / 2^((2 power + 1) min(sqrt(gamma), 1))
 * at a true singular gap. side selects the V (right) or U (left) partition.
 * The head alignment must have full rank ell; a missing gap raises
 * NoGapAtIndex, rank deficiency raises NotCompatible. ell == 0 and
 * ell == rank return zeros flagged omitted.
 *
 * requireFullHeadRank = false evaluates the pure formula instead, letting the
 * pseudoinverse absorb any rank deficiency; the cluster-end terms of the
 * gapless bounds need this, since there the alignment rank may sit anywhere
 * between h and ell.
 */
DeflationCoefficient deflation_coefficient(const SVDFactorization& svd, const Matrix& W,
                                           int power, Index ell, Side side,
                                           double clusterTol = kDefaultClusterTol,
                                           double rankTol = kDefaultRankTol,
                                           bool requireFullHeadRank = true);

struct ResidualCoefficient {
    double val2 = 0.0;
    double valF = 0.0;
};

/// ||U_{k,perp}^T Y (U_k^T Y)^+||; non-increasing in the Krylov order once
/// the order reaches the distinct-value count q0.
ResidualCoefficient residual_coefficient(const SVDFactorization& svd, const OrthonormalBasis& Y,
                                         Index kIndex, double rankTol = kDefaultRankTol);

struct ResidualSeries {
    Index kIndex = 0;
    Index q0 = 0;
    int qFrom = 0;
    std::vector<double> val2, valF;

    bool nonIncreasing(double slack = 1e-10) const;
};

/// residual_coefficient over Krylov orders qFrom..qTo, built incrementally.
ResidualSeries residual_series(const SVDFactorization& svd, const Matrix& X, Index h, int qFrom,
                               int qTo, double clusterTol = kDefaultClusterTol,
                               double rankTol = kDefaultRankTol);

/**
 * Evaluated bound: rhs is the certified upper estimate, lhs the achieved
 * sin-Theta distance between the witness dominant subspace and the
 * approximation space. Soundness means lhs <= rhs + tol*(1 + rhs) in both
 * norms. Bounds are only emitted after their hypotheses verified; failing
 * hypotheses raise NotCompatible / NoGapAtIndex / InvalidArgument instead.
 */
struct BoundCertificate {
    std::string theoremId;  // T31, C32, T33, T34, T35, T37
    double lhs2 = 0.0, lhsF = 0.0;
    double rhs2 = 0.0, rhsF = 0.0;
    double term1_2 = 0.0, term1F = 0.0;  // head-gap contribution
    double term2_2 = 0.0, term2F = 0.0;  // tail-gap contribution
    bool omittedFirst = false;
    bool omittedSecond = false;
    Index h = 0, j = 0, k = 0;
    int q = 0, t = -1;  // t < 0: not applicable to this bound
    double gammaJ = 0.0, gammaK = 0.0;  // zero when the corresponding term is omitted
    double clusterTol = kDefaultClusterTol;
    double rankTol = kDefaultRankTol;
    bool hypothesesVerified = false;
    Matrix witness;           // dominant subspace basis achieving lhs
    std::string witnessKind;  // "aligned" | "construction" | "grid"
    // order-q bound only: entrywise angle comparison of the compressed and
    // ambient guess positions (both non-decreasing)
    std::vector<double> secondaryLhsAngles, secondaryRhsAngles;

    bool sound(double tol = 1e-8) const;
    std::string to_json(bool includeWitness = true) const;
};

/**
 * Order-q bound with an explicit admissible odd filter (degree <= 2q+1,
 * phi(sigma_1) >= ... >= phi(sigma_k) > 0): some h-dimensional left dominant
 * subspace S' satisfies
 *
 *   ||sin Theta(K_q, S')|| <= 4 ||sin Theta(R(V_k^T X), V_k^T V_j)||
 *       + ||phi(Sigma_{k,perp})||_2 ||phi(Sigma_k)^{-1}||_2 ||V_{k,perp}^T X (V_k^T X)^+||.
 */
BoundCertificate thm31_bound(const SVDFactorization& svd, const Matrix& X, Index h, int q,
                             const OddPolynomial& phi,
                             double clusterTol = kDefaultClusterTol,
                             double rankTol = kDefaultRankTol);

/// Order-q bound with the built-in gap amplifier folded in:
/// 4 ||sin Theta(R(X), V_j)|| + Delta(X, q, k) * sigma_{k+1}/sigma_k.
BoundCertificate cor32_bound(const SVDFactorization& svd, const Matrix& X, Index h, int q,
                             double clusterTol = kDefaultClusterTol,
                             double rankTol = kDefaultRankTol);

/// Augmented-subspace bound (right dominant witness against K*_{q,t}):
/// 4 Delta(X,q,j) sigma_{j+1}/sigma_j + Delta*(Y_q,t,k) sigma_{k+1}/sigma_k.
BoundCertificate thm33_bound(const SVDFactorization& svd, const Matrix& X, Index h, int q, int t,
                             double clusterTol = kDefaultClusterTol,
                             double rankTol = kDefaultRankTol);

/// Deep-Krylov bound (left dominant witness against K_{q+t+1}):
/// 4 Delta*(AX,q,j) sigma_{j+1}/sigma_j + Delta(W_q,t,k) sigma_{k+1}/sigma_k.
BoundCertificate thm34_bound(const SVDFactorization& svd, const Matrix& X, Index h, int q, int t,
                             double clusterTol = kDefaultClusterTol,
                             double rankTol = kDefaultRankTol);

/**
 * Exhaustive dominant-subspace search on a 1-degree grid, feasible when the
 * free cluster direction count (or its complement inside the cluster) is one
 * and the cluster width is at most 4. Returns the first witness making
 * lhs <= rhs + tol*(1+rhs) in both norms, or nullopt.
 */
std::optional<OrthonormalBasis> exhaustive_witness_search(
    const SVDFactorization& svd, const OrthonormalBasis& space, Index h, Side side,
    double rhs2, double rhsF, double tol = 1e-8, double clusterTol = kDefaultClusterTol);

/// Re-validates a certificate, retrying with the exhaustive grid witness on
/// failure; updates the certificate in place when a better witness is found.
bool certify_with_fallback(BoundCertificate& cert, const SVDFactorization& svd,
                           const OrthonormalBasis& space, Side side, double tol = 1e-8);

}  // namespace krydom

#endif
