#include <doctest.h>

#include "krydom/amplifier.hpp"
#include "krydom/krylov.hpp"
#include "krydom/subspace.hpp"
#include "support.hpp"

using namespace krydom;
using namespace krydom::testing;

namespace {

Matrix diag3(double a, double b, double c) {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = a;
    A(1, 1) = b;
    A(2, 2) = c;
    return A;
}

// direct-span oracle: orthonormal range of the stacked generator blocks
OrthonormalBasis generators_span(const Matrix& A, const Matrix& X, int q) {
    Matrix block = A * X;
    Matrix all = block;
    for (int i = 1; i <= q; ++i) {
        block = A * (A.transpose() * block);
        Matrix next(all.rows(), all.cols() + block.cols());
        next << all, block;
        all = std::move(next);
    }
    return orthonormal_range(all);
}

}  // namespace

TEST_CASE("explicit generators of a diagonal example") {
    const Matrix A = diag3(3, 2, 1);
    Matrix X(3, 1);
    X << 1, 1, 1;

    const KrylovBasis kb1 = krylov_basis(A, X, 1);
    CHECK(kb1.dim() == 2);
    Matrix gen(3, 2);
    gen << 3, 27, 2, 8, 1, 1;  // A X and (A A^T) A X
    const OrthonormalBasis expected = orthonormal_range(gen);
    CHECK(sin_theta_F(kb1.basis, expected) <= 1e-10);
    CHECK(sin_theta_F(expected, kb1.basis) <= 1e-10);

    const KrylovBasis kb2 = krylov_basis(A, X, 2);
    CHECK(kb2.dim() == 3);  // generic start, distinct eigenvalues: full space
}

TEST_CASE("kernel start yields the empty signal") {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = 1.0;
    Matrix X(3, 1);
    X << 0, 0, 1;  // A X = 0
    const KrylovBasis kb = krylov_basis(A, X, 2);
    CHECK(kb.empty());
    CHECK(kb.dim() == 0);

    const KrylovBasis more = extend(kb, A, X);
    CHECK(more.empty());
    CHECK(more.q == 3);

    const OrthonormalBasis aug = augmented_subspace(A, X, 1, 1);
    CHECK(aug.dim() == 0);
}

TEST_CASE("extend matches the direct construction") {
    const Matrix A = diag3(3, 2, 1);
    Matrix X(3, 1);
    X << 1, 1, 1;
    const KrylovBasis kb1 = krylov_basis(A, X, 1);
    const KrylovBasis kb2 = extend(kb1, A, X);
    CHECK(kb2.q == 2);
    CHECK(kb2.dim() == 3);

    const Matrix B = seeded_matrix(9, 6, 51);
    const Matrix Y = seeded_matrix(6, 2, 52);
    const KrylovBasis direct = krylov_basis(B, Y, 3);
    KrylovBasis stepped = krylov_basis(B, Y, 1);
    stepped = extend(stepped, B, Y);
    stepped = extend(stepped, B, Y);
    CHECK(stepped.q == 3);
    CHECK(stepped.dim() == direct.dim());
    CHECK(sin_theta_F(stepped.basis, direct.basis) <= 1e-8);
    CHECK(sin_theta_F(direct.basis, stepped.basis) <= 1e-8);
}

TEST_CASE("extend rejects mismatched provenance") {
    const Matrix A = seeded_matrix(5, 4, 61);
    const Matrix X = seeded_matrix(4, 2, 62);
    const KrylovBasis kb = krylov_basis(A, X, 1);
    const Matrix other = seeded_matrix(5, 4, 63);
    CHECK_THROWS_AS(extend(kb, other, X), InvalidArgument);
}

TEST_CASE("generator blocks stay inside the basis span") {
    const Matrix A = seeded_matrix(10, 7, 71);
    const Matrix X = seeded_matrix(7, 2, 72);
    const int q = 3;
    const KrylovBasis kb = krylov_basis(A, X, q);

    Matrix block = A * X;
    for (int i = 0; i <= q; ++i) {
        if (i > 0) block = A * (A.transpose() * block);
        Matrix unitized = block;
        for (Index c = 0; c < unitized.cols(); ++c) {
            const double nrm = unitized.col(c).norm();
            if (nrm > 0) unitized.col(c) /= nrm;
        }
        const Matrix res = unitized - kb.basis.Q * (kb.basis.Q.transpose() * unitized);
        CHECK(res.norm() <= 1e-8 * unitized.cols());
    }
}

TEST_CASE("basis quality after reorthogonalization") {
    const Matrix A = seeded_matrix(12, 9, 81);
    const Matrix X = seeded_matrix(9, 3, 82);
    const KrylovBasis kb = krylov_basis(A, X, 4);
    CHECK(kb.basis.orthonormalityDefect() <= 1e-12 * std::max<Index>(1, kb.dim()));
    Index total = 0;
    for (Index d : kb.blockDims) total += d;
    CHECK(total == kb.dim());
    CHECK(kb.dim() <= std::min<Index>((4 + 1) * 3, 12));
}

TEST_CASE("order nesting") {
    const Matrix A = seeded_matrix(9, 7, 91);
    const Matrix X = seeded_matrix(7, 2, 92);
    const KrylovBasis lo = krylov_basis(A, X, 1);
    const KrylovBasis hi = krylov_basis(A, X, 4);
    CHECK(sin_theta_F(lo.basis, hi.basis) <= 1e-8);
}

TEST_CASE("odd filters of admissible degree land inside the block space") {
    const Matrix A = seeded_matrix(8, 6, 101);
    const Matrix X = seeded_matrix(6, 2, 102);
    const int q = 2;
    const KrylovBasis kb = krylov_basis(A, X, q);
    harness::Rng rng(harness::Rng::derive(103, 0, 0));
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> coeffs(static_cast<std::size_t>(q) + 1);
        for (double& c : coeffs) c = rng.gaussian();
        if (coeffs.back() == 0.0) coeffs.back() = 1.0;
        const Matrix F = apply_odd_polynomial(A, OddPolynomial::from_odd_coefficients(coeffs), X);
        Matrix unitized = F;
        for (Index c = 0; c < unitized.cols(); ++c) {
            const double nrm = unitized.col(c).norm();
            if (nrm > 0) unitized.col(c) /= nrm;
        }
        const Matrix res = unitized - kb.basis.Q * (kb.basis.Q.transpose() * unitized);
        CHECK(res.norm() <= 1e-8 * unitized.cols());
    }
}

TEST_CASE("augmented subspace with a single summand") {
    const Matrix A = diag3(3, 2, 1);
    Matrix X(3, 1);
    X << 1, 1, 1;
    const OrthonormalBasis aug = augmented_subspace(A, X, 0, 0);
    const OrthonormalBasis oracle = orthonormal_range(A.transpose() * A * X);
    REQUIRE(aug.dim() == oracle.dim());
    CHECK(sin_theta_F(aug, oracle) <= 1e-9);
    CHECK(sin_theta_F(oracle, aug) <= 1e-9);
}

TEST_CASE("augmented subspace equals the direct sum of ranges") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix A = clustered_matrix({3, 2, 2, 1}, 7, 6, 110 + seed);
        const Matrix X = seeded_matrix(6, 2, 120 + seed);
        for (int q : {0, 1}) {
            for (int t : {0, 1, 2}) {
                const OrthonormalBasis aug = augmented_subspace(A, X, q, t);

                const Matrix AtA = A.transpose() * A;
                Matrix power = X;
                Matrix all(A.cols(), 0);
                for (int i = 1; i <= q + t + 1; ++i) {
                    power = AtA * power;
                    Matrix next(A.cols(), all.cols() + power.cols());
                    next << all, power;
                    all = std::move(next);
                }
                const OrthonormalBasis oracle = orthonormal_range(all, 1e-9);
                REQUIRE(aug.dim() == oracle.dim());
                CHECK(sin_theta_F(aug, oracle) <= 1e-9 * std::max<Index>(1, aug.dim()));
            }
        }
    }
}

TEST_CASE("image of the augmented subspace sits inside the deeper block space") {
    const Matrix A = clustered_matrix({4, 2, 2, 2, 1}, 9, 8, 131);
    const Matrix X = seeded_matrix(8, 2, 132);
    const int q = 1, t = 2;
    const OrthonormalBasis aug = augmented_subspace(A, X, q, t);
    const OrthonormalBasis image = orthonormal_range(A * aug.Q);
    const KrylovBasis deep = krylov_basis(A, X, q + t + 1);
    CHECK(sin_theta_F(image, deep.basis) <= 1e-8);
}

TEST_CASE("two augmented construction routes coincide") {
    const Matrix A = clustered_matrix({3, 2, 2, 1}, 8, 6, 141);
    const Matrix X = seeded_matrix(6, 2, 142);
    const int q = 1, t = 1;
    const OrthonormalBasis viaKrylov = augmented_subspace(A, X, q, t);
    const KrylovBasis kq = krylov_basis(A, X, q);
    const KrylovBasis kt = krylov_basis(A.transpose(), kq.basis.Q, t);
    CHECK(viaKrylov.dim() == kt.dim());
    CHECK(sin_theta_F(viaKrylov, kt.basis) <= 1e-10);
}

TEST_CASE("saturated spaces stop growing") {
    const Matrix A = seeded_matrix(5, 5, 151);
    const Matrix X = Matrix::Identity(5, 5);
    const KrylovBasis kb = krylov_basis(A, X, 4);
    CHECK(kb.dim() == 5);
    CHECK(kb.blockDims[0] == 5);
    for (std::size_t i = 1; i < kb.blockDims.size(); ++i) CHECK(kb.blockDims[i] == 0);
    CHECK(generators_span(A, X, 4).dim() == 5);
}
