#ifndef KRYDOM_MATRIX_CORE_HPP
#define KRYDOM_MATRIX_CORE_HPP

#include <Eigen/Dense>

#include "krydom/errors.hpp"

namespace krydom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index  = Eigen::Index;

/// Default relative rank tolerance; effective cutoff is tol * sigma_1 * max(m,n).
inline constexpr double kDefaultRankTol = 1e-12;
/// Default relative tolerance deciding equality of singular values (vs sigma_1).
inline constexpr double kDefaultClusterTol = 1e-10;
/// Default deflation tolerance for Krylov block orthogonalization.
inline constexpr double kDefaultKrylovTol = 1e-10;

void require_finite(const Matrix& A, const char* where);

/**
 * Full singular value decomposition A = U * diag(sigma) * V^T with square
 * orthogonal factors, non-increasing singular values and a deterministic
 * sign convention: the first nonzero entry of each U column is non-negative
 * (the paired V column is flipped along with it).
 *
 * Partition helpers expose the leading/trailing blocks at any split index
 * 0 <= l <= min(m,n).
 */
struct SVDFactorization {
    Matrix U;       // m x m orthogonal
    Vector sigma;   // length min(m,n), non-increasing
    Matrix V;       // n x n orthogonal
    Index rank = 0; // count of singular values above the rank cutoff
    double rankTol = kDefaultRankTol;

    Index rows() const { return U.rows(); }
    Index cols() const { return V.rows(); }
    Index p() const { return sigma.size(); }

    Matrix uHead(Index l) const { return U.leftCols(l); }
    Matrix uTail(Index l) const { return U.rightCols(U.cols() - l); }
    Matrix vHead(Index l) const { return V.leftCols(l); }
    Matrix vTail(Index l) const { return V.rightCols(V.cols() - l); }
    Vector sigmaHead(Index l) const { return sigma.head(l); }
    Vector sigmaTail(Index l) const { return sigma.tail(sigma.size() - l); }

    /// Reconstructs the factored matrix U * diag(sigma) * V^T.
    Matrix reconstruct() const;
};

/// Basis with orthonormal columns; dim() == 0 encodes the trivial subspace.
struct OrthonormalBasis {
    Matrix Q;  // ambientDim x dim

    OrthonormalBasis() = default;
    explicit OrthonormalBasis(Matrix q) : Q(std::move(q)) {}
    static OrthonormalBasis empty(Index ambientDim) { return OrthonormalBasis(Matrix(ambientDim, 0)); }

    Index ambientDim() const { return Q.rows(); }
    Index dim() const { return Q.cols(); }
    /// Frobenius departure of Q^T Q from the identity.
    double orthonormalityDefect() const;
};

SVDFactorization thin_svd(const Matrix& A, double rankTol = kDefaultRankTol);

Matrix pseudoinverse(const Matrix& A, double rankTol = kDefaultRankTol);

OrthonormalBasis orthonormal_range(const Matrix& A, double rankTol = kDefaultRankTol);

/// Best rank-i approximation U_i Sigma_i V_i^T; i == 0 gives the zero matrix.
Matrix truncated_svd_approx(const Matrix& A, Index i);

double spectral_norm(const Matrix& A);

/// Count of values above rankTol * sigma(0) * dimScale (sigma non-increasing).
Index numerical_rank(const Vector& sigma, double rankTol, Index dimScale);

}  // namespace krydom

#endif
