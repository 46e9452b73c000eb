#ifndef KRYDOM_KRYLOV_HPP
#define KRYDOM_KRYLOV_HPP

#include <cstdint>
#include <vector>

#include "krydom/matrix_core.hpp"

namespace krydom {

/// Cheap deterministic fingerprint (FNV-1a over the raw entry bytes).
std::uint64_t matrix_fingerprint(const Matrix& A);

/**
 * Orthonormal basis of the block space spanned by A X, (A A^T) A X, ...,
 * (A A^T)^q A X, built block by block with two-pass Gram-Schmidt against the
 * accumulated basis followed by column-pivoted QR deflation.
 *
 * An all-zero first block (A X = 0) yields the empty basis, which every
 * consumer treats as the "empty Krylov" signal and propagates. The last
 * retained block plus the running column-norm scale make q -> q+1 extension
 * incremental.
 */
struct KrylovBasis {
    OrthonormalBasis basis;        // in the row space of A (dimension m)
    int q = 0;
    std::vector<Index> blockDims;  // retained dimensions per power step
    std::uint64_t provenanceA = 0;
    std::uint64_t provenanceX = 0;
    double rankTol = kDefaultKrylovTol;

    // incremental-extension state
    Matrix lastBlock;   // orthonormalized block of the final step
    double scale = 0.0; // running largest raw generator column norm

    bool empty() const { return basis.dim() == 0; }
    Index dim() const { return basis.dim(); }
};

KrylovBasis krylov_basis(const Matrix& A, const Matrix& X, int q,
                         double rankTol = kDefaultKrylovTol);

/// One more power step; equals krylov_basis(A, X, kb.q + 1) up to re-spanning.
KrylovBasis extend(const KrylovBasis& kb, const Matrix& A, const Matrix& X);

/**
 * Orthonormal basis of R((A^T A) X) + R((A^T A)^2 X) + ... + R((A^T A)^(q+t+1) X)
 * in the column space of A^T (dimension n), computed as the order-t block
 * space of (A^T, Y_q) where Y_q spans the order-q block space of (A, X).
 */
OrthonormalBasis augmented_subspace(const Matrix& A, const Matrix& X, int q, int t,
                                    double rankTol = kDefaultKrylovTol);

}  // namespace krydom

#endif
