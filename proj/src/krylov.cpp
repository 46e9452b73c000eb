#include "krydom/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace krydom {

namespace {

// Orthogonalizes Z against Y twice, then deflates by column-pivoted QR at
// rankTol * scale. Returns the retained orthonormal columns.
Matrix orthonormalize_block(const Matrix& Y, Matrix Z, double rankTol, double scale) {
    if (Z.cols() == 0) return Z;
    for (int pass = 0; pass < 2; ++pass) {
        if (Y.cols() > 0) Z -= Y * (Y.transpose() * Z);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(Z);
    const Matrix R = qr.matrixR();
    const Index maxCols = std::min(Z.rows(), Z.cols());
    Index keep = 0;
    while (keep < maxCols && std::abs(R(keep, keep)) > rankTol * scale) ++keep;
    if (keep == 0) return Matrix(Z.rows(), 0);
    Matrix Q = qr.householderQ() * Matrix::Identity(Z.rows(), keep);
    // one clean-up pass keeps the accumulated basis orthonormal to machine level
    if (Y.cols() > 0) {
        Q -= Y * (Y.transpose() * Q);
        Eigen::HouseholderQR<Matrix> fix(Q);
        Q = fix.householderQ() * Matrix::Identity(Z.rows(), keep);
    }
    return Q;
}

double max_column_norm(const Matrix& M) {
    double s = 0.0;
    for (Index c = 0; c < M.cols(); ++c) s = std::max(s, M.col(c).norm());
    return s;
}

Matrix append_columns(const Matrix& Y, const Matrix& Q) {
    Matrix out(Y.rows(), Y.cols() + Q.cols());
    out << Y, Q;
    return out;
}

}  // namespace

std::uint64_t matrix_fingerprint(const Matrix& A) {
    std::uint64_t hash = 1469598103934665603ull;
    auto mix = [&hash](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            hash ^= (v >> (8 * b)) & 0xffu;
            hash *= 1099511628211ull;
        }
    };
    mix(static_cast<std::uint64_t>(A.rows()));
    mix(static_cast<std::uint64_t>(A.cols()));
    for (Index j = 0; j < A.cols(); ++j) {
        for (Index i = 0; i < A.rows(); ++i) {
            std::uint64_t bits;
            const double v = A(i, j);
            static_assert(sizeof(bits) == sizeof(v));
            std::memcpy(&bits, &v, sizeof(bits));
            mix(bits);
        }
    }
    return hash;
}

KrylovBasis krylov_basis(const Matrix& A, const Matrix& X, int q, double rankTol) {
    require_finite(A, "krylov_basis");
    require_finite(X, "krylov_basis");
    if (A.cols() != X.rows()) throw InvalidArgument("krylov_basis: A.cols() != X.rows()");
    if (q < 0) throw InvalidArgument("krylov_basis: q must be non-negative");

    KrylovBasis kb;
    kb.q = q;
    kb.rankTol = rankTol;
    kb.provenanceA = matrix_fingerprint(A);
    kb.provenanceX = matrix_fingerprint(X);

    const Index m = A.rows();
    Matrix Y(m, 0);
    Matrix block = A * X;
    kb.scale = max_column_norm(block);
    if (kb.scale == 0.0) {
        // A X = 0: all generators vanish (empty Krylov signal)
        kb.basis = OrthonormalBasis::empty(m);
        kb.lastBlock = Matrix(m, 0);
        kb.blockDims.assign(static_cast<std::size_t>(q) + 1, 0);
        return kb;
    }

    for (int step = 0; step <= q; ++step) {
        if (step > 0) {
            if (kb.lastBlock.cols() == 0) {
                // saturated: later generators stay inside the accumulated span
                kb.blockDims.push_back(0);
                continue;
            }
            block = A * (A.transpose() * kb.lastBlock);
            kb.scale = std::max(kb.scale, max_column_norm(block));
        }
        const Matrix Q = orthonormalize_block(Y, block, rankTol, kb.scale);
        kb.blockDims.push_back(Q.cols());
        if (Q.cols() > 0) Y = append_columns(Y, Q);
        kb.lastBlock = Q;
    }

    kb.basis = OrthonormalBasis(std::move(Y));
    return kb;
}

KrylovBasis extend(const KrylovBasis& kb, const Matrix& A, const Matrix& X) {
    if (kb.provenanceA != matrix_fingerprint(A) || kb.provenanceX != matrix_fingerprint(X)) {
        throw InvalidArgument("extend: provenance mismatch, basis was built from different data");
    }
    KrylovBasis out = kb;
    out.q = kb.q + 1;
    if (kb.empty() || kb.lastBlock.cols() == 0) {
        out.blockDims.push_back(0);
        return out;
    }
    Matrix block = A * (A.transpose() * kb.lastBlock);
    out.scale = std::max(kb.scale, max_column_norm(block));
    const Matrix Q = orthonormalize_block(kb.basis.Q, std::move(block), kb.rankTol, out.scale);
    out.blockDims.push_back(Q.cols());
    if (Q.cols() > 0) out.basis = OrthonormalBasis(append_columns(kb.basis.Q, Q));
    out.lastBlock = Q;
    return out;
}

OrthonormalBasis augmented_subspace(const Matrix& A, const Matrix& X, int q, int t,
                                    double rankTol) {
    if (t < 0) throw InvalidArgument("augmented_subspace: t must be non-negative");
    const KrylovBasis kq = krylov_basis(A, X, q, rankTol);
    if (kq.empty()) return OrthonormalBasis::empty(A.cols());
    const KrylovBasis kt = krylov_basis(A.transpose(), kq.basis.Q, t, rankTol);
    return kt.basis;
}

}  // namespace krydom
