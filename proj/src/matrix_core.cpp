#include "krydom/matrix_core.hpp"

#include <algorithm>
#include <cmath>

namespace krydom {

namespace {

// Jacobi SVD for accuracy at small sizes, divide-and-conquer above.
constexpr Index kJacobiMaxDim = 64;

void svd_full(const Matrix& A, Matrix& U, Vector& sigma, Matrix& V) {
    if (std::max(A.rows(), A.cols()) <= kJacobiMaxDim) {
        Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
        U = svd.matrixU();
        sigma = svd.singularValues();
        V = svd.matrixV();
    } else {
        Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
        U = svd.matrixU();
        sigma = svd.singularValues();
        V = svd.matrixV();
    }
}

// First nonzero entry of each U column made non-negative; the paired V column
// flips with it so the product is preserved. Unpaired trailing columns follow
// their own first-nonzero rule.
void fix_signs(Matrix& U, Matrix& V, Index p) {
    auto firstNonzeroNegative = [](const Matrix& M, Index col) {
        for (Index r = 0; r < M.rows(); ++r) {
            const double v = M(r, col);
            if (v != 0.0) return v < 0.0;
        }
        return false;
    };
    for (Index i = 0; i < U.cols(); ++i) {
        if (firstNonzeroNegative(U, i)) {
            U.col(i) = -U.col(i);
            if (i < p && i < V.cols()) V.col(i) = -V.col(i);
        }
    }
    for (Index i = p; i < V.cols(); ++i) {
        if (firstNonzeroNegative(V, i)) V.col(i) = -V.col(i);
    }
}

}  // namespace

void require_finite(const Matrix& A, const char* where) {
    if (!A.allFinite()) {
        throw InvalidInput(std::string(where) + ": matrix has non-finite entries");
    }
}

Matrix SVDFactorization::reconstruct() const {
    const Index len = sigma.size();
    return U.leftCols(len) * sigma.asDiagonal() * V.leftCols(len).transpose();
}

double OrthonormalBasis::orthonormalityDefect() const {
    if (dim() == 0) return 0.0;
    return (Q.transpose() * Q - Matrix::Identity(dim(), dim())).norm();
}

Index numerical_rank(const Vector& sigma, double rankTol, Index dimScale) {
    if (sigma.size() == 0) return 0;
    const double cutoff = rankTol * sigma(0) * static_cast<double>(dimScale);
    Index r = 0;
    while (r < sigma.size() && sigma(r) > cutoff) ++r;
    return r;
}

SVDFactorization thin_svd(const Matrix& A, double rankTol) {
    require_finite(A, "thin_svd");
    if (A.rows() < 1 || A.cols() < 1) throw InvalidArgument("thin_svd: empty matrix");

    SVDFactorization f;
    svd_full(A, f.U, f.sigma, f.V);
    fix_signs(f.U, f.V, f.sigma.size());
    f.rankTol = rankTol;
    f.rank = numerical_rank(f.sigma, rankTol, std::max(A.rows(), A.cols()));
    return f;
}

Matrix pseudoinverse(const Matrix& A, double rankTol) {
    require_finite(A, "pseudoinverse");
    if (rankTol <= 0.0) throw InvalidArgument("pseudoinverse: rankTol must be positive");

    const SVDFactorization f = thin_svd(A, rankTol);
    Matrix P = Matrix::Zero(A.cols(), A.rows());
    for (Index i = 0; i < f.rank; ++i) {
        P += (1.0 / f.sigma(i)) * f.V.col(i) * f.U.col(i).transpose();
    }
    return P;
}

OrthonormalBasis orthonormal_range(const Matrix& A, double rankTol) {
    require_finite(A, "orthonormal_range");
    const SVDFactorization f = thin_svd(A, rankTol);
    return OrthonormalBasis(f.U.leftCols(f.rank));
}

Matrix truncated_svd_approx(const Matrix& A, Index i) {
    require_finite(A, "truncated_svd_approx");
    const Index p = std::min(A.rows(), A.cols());
    if (i < 0 || i > p) {
        throw InvalidArgument("truncated_svd_approx: truncation index out of range");
    }
    if (i == 0) return Matrix::Zero(A.rows(), A.cols());
    const SVDFactorization f = thin_svd(A);
    return f.U.leftCols(i) * f.sigma.head(i).asDiagonal() * f.V.leftCols(i).transpose();
}

double spectral_norm(const Matrix& A) {
    require_finite(A, "spectral_norm");
    if (A.rows() == 0 || A.cols() == 0) return 0.0;
    if (std::max(A.rows(), A.cols()) <= kJacobiMaxDim) {
        return Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
    }
    return Eigen::BDCSVD<Matrix>(A).singularValues()(0);
}

}  // namespace krydom
