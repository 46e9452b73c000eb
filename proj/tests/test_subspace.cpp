#include <doctest.h>

#include <cmath>

#include "krydom/subspace.hpp"
#include "support.hpp"

using namespace krydom;
using namespace krydom::testing;

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

OrthonormalBasis span_of(std::initializer_list<Vector> cols) {
    Matrix M(cols.begin()->size(), static_cast<Index>(cols.size()));
    Index c = 0;
    for (const Vector& v : cols) M.col(c++) = v;
    return orthonormal_range(M);
}

Vector e(Index n, Index i) {
    Vector v = Vector::Zero(n);
    v(i) = 1.0;
    return v;
}

// projector-route oracle for the sin norms
double sin2_oracle(const OrthonormalBasis& S, const OrthonormalBasis& T) {
    const Matrix M = (Matrix::Identity(T.ambientDim(), T.ambientDim()) -
                      T.Q * T.Q.transpose()) *
                     S.Q * S.Q.transpose();
    return spectral_norm(M);
}

double sinF_oracle(const OrthonormalBasis& S, const OrthonormalBasis& T) {
    const Matrix M = (Matrix::Identity(T.ambientDim(), T.ambientDim()) -
                      T.Q * T.Q.transpose()) *
                     S.Q * S.Q.transpose();
    return M.norm();
}

}  // namespace

TEST_CASE("principal angle of a planar rotation") {
    const double t = 0.3;
    const OrthonormalBasis S(Matrix::Identity(2, 2).leftCols(1));
    Matrix Tm(2, 1);
    Tm << std::cos(t), std::sin(t);
    const OrthonormalBasis T(Tm);
    const PrincipalVectorPair pair = principal_angles(S, T);
    REQUIRE(pair.angles.count() == 1);
    CHECK(pair.angles.angles(0) == doctest::Approx(t).epsilon(1e-12));
}

TEST_CASE("identical subspaces have zero angles") {
    const OrthonormalBasis S = random_subspace(7, 3, 31);
    const PrincipalVectorPair pair = principal_angles(S, S);
    CHECK(pair.angles.angles.maxCoeff() <= 1e-9);
}

TEST_CASE("shared and orthogonal directions in R^3") {
    const OrthonormalBasis S = span_of({e(3, 0), e(3, 1)});
    const OrthonormalBasis T = span_of({e(3, 0), e(3, 2)});
    const PrincipalVectorPair pair = principal_angles(S, T);
    REQUIRE(pair.angles.count() == 2);
    CHECK(pair.angles.angles(0) <= 1e-9);
    CHECK(pair.angles.angles(1) == doctest::Approx(kHalfPi).epsilon(1e-12));
}

TEST_CASE("principal vectors pair up with the angle cosines") {
    const OrthonormalBasis S = random_subspace(9, 3, 41);
    const OrthonormalBasis T = random_subspace(9, 4, 42);
    const PrincipalVectorPair pair = principal_angles(S, T);
    const Matrix G = pair.uBasis.Q.transpose() * pair.vBasis.Q;
    for (Index i = 0; i < pair.angles.count(); ++i) {
        for (Index j = 0; j < pair.angles.count(); ++j) {
            const double expected = (i == j) ? pair.angles.cosines(j) : 0.0;
            CHECK(std::abs(G(i, j) - expected) <= 1e-9);
        }
    }
}

TEST_CASE("principal_angles input validation") {
    CHECK_THROWS_AS(principal_angles(random_subspace(5, 2, 1), random_subspace(6, 2, 2)),
                    InvalidArgument);
    CHECK_THROWS_AS(principal_angles(OrthonormalBasis::empty(5), random_subspace(5, 2, 3)),
                    InvalidArgument);
}

TEST_CASE("sin_tan_theta_norms on identical subspaces") {
    const OrthonormalBasis S = random_subspace(6, 2, 55);
    const SinTanNorms n = sin_tan_theta_norms(S, S);
    CHECK(n.sin2 <= 1e-9);
    CHECK(n.sinF <= 1e-9);
    CHECK(n.tan2 <= 1e-9);
    CHECK_FALSE(n.tanInfinite);
}

TEST_CASE("sin_tan_theta_norms on the planar case") {
    const double t = 0.3;
    const OrthonormalBasis S(Matrix::Identity(2, 2).leftCols(1));
    Matrix Tm(2, 1);
    Tm << std::cos(t), std::sin(t);
    const SinTanNorms n = sin_tan_theta_norms(S, OrthonormalBasis(Tm));
    CHECK(n.sin2 == doctest::Approx(std::sin(t)).epsilon(1e-12));
    CHECK(n.tan2 == doctest::Approx(std::tan(t)).epsilon(1e-12));
}

TEST_CASE("sin_tan_theta_norms flags right angles as infinite tangents") {
    const OrthonormalBasis S = span_of({e(3, 0)});
    const OrthonormalBasis T = span_of({e(3, 1)});
    const SinTanNorms n = sin_tan_theta_norms(S, T);
    CHECK(n.tanInfinite);
    CHECK(std::isinf(n.tan2));
}

TEST_CASE("sin_tan_theta_norms enforces the asymmetric convention") {
    CHECK_THROWS_AS(sin_tan_theta_norms(random_subspace(6, 3, 7), random_subspace(6, 2, 8)),
                    InvalidArgument);
}

TEST_CASE("angle route agrees with the projector route") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const OrthonormalBasis S = random_subspace(6, 2, 100 + seed);
        const OrthonormalBasis T = random_subspace(6, 3, 200 + seed);
        const SinTanNorms n = sin_tan_theta_norms(S, T);
        CHECK(std::abs(n.sin2 - sin2_oracle(S, T)) <= 1e-10);
        CHECK(std::abs(n.sinF - sinF_oracle(S, T)) <= 1e-10);
    }
}

TEST_CASE("nesting shrinks the sin norms") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const OrthonormalBasis S = random_subspace(8, 3, 300 + seed);
        const OrthonormalBasis T = random_subspace(8, 4, 400 + seed);
        const OrthonormalBasis Ssub(S.Q.leftCols(2));
        Matrix Text(8, 5);
        Text << T.Q, random_subspace(8, 1, 500 + seed).Q;
        const OrthonormalBasis Tbig = orthonormal_range(Text);
        REQUIRE(Tbig.dim() == 5);

        const SinTanNorms base = sin_tan_theta_norms(S, T);
        const SinTanNorms grownT = sin_tan_theta_norms(S, Tbig);
        const SinTanNorms shrunkS = sin_tan_theta_norms(Ssub, T);
        CHECK(grownT.sin2 <= base.sin2 + 1e-10);
        CHECK(grownT.sinF <= base.sinF + 1e-10);
        CHECK(shrunkS.sin2 <= base.sin2 + 1e-10);
        CHECK(shrunkS.sinF <= base.sinF + 1e-10);
    }
}

TEST_CASE("complement identity for the nonzero angles") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const Index n = 7;
        const OrthonormalBasis S = random_subspace(n, 3, 600 + seed);
        const OrthonormalBasis T = random_subspace(n, 3, 700 + seed);

        auto complement = [n](const OrthonormalBasis& B) {
            const Matrix P = Matrix::Identity(n, n) - B.Q * B.Q.transpose();
            return orthonormal_range(P);
        };
        const SinTanNorms direct = sin_tan_theta_norms(S, T);
        const SinTanNorms comp = sin_tan_theta_norms(complement(S), complement(T));
        CHECK(std::abs(direct.sin2 - comp.sin2) <= 1e-9);
        CHECK(std::abs(direct.sinF - comp.sinF) <= 1e-9);
    }
}

// gluing mutually orthogonal pairs at most doubles the summed sin norms
TEST_CASE("orthogonal direct sums glue with constant two") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Index n = 10;
        const OrthonormalBasis TT = random_subspace(n, 5, 800 + seed);
        const OrthonormalBasis HH = random_subspace(n, 4, 900 + seed);
        const OrthonormalBasis Tp(TT.Q.leftCols(3)), Tpp(TT.Q.rightCols(2));
        const OrthonormalBasis Hp(HH.Q.leftCols(2)), Hpp(HH.Q.rightCols(2));

        const double lhs2 = sin2_oracle(HH, TT);
        const double lhsF = sinF_oracle(HH, TT);
        const double rhs2 = sin2_oracle(Hp, Tp) + sin2_oracle(Hpp, Tpp);
        const double rhsF = sinF_oracle(Hp, Tp) + sinF_oracle(Hpp, Tpp);
        CHECK(lhs2 <= 2.0 * rhs2 + 1e-9);
        CHECK(lhsF <= 2.0 * rhsF + 1e-9);
    }
}

// compressing through an isometry cannot grow the principal angles
TEST_CASE("isometry compression shrinks angles entrywise") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Index n = 8, k = 5, j = 2;
        const OrthonormalBasis V = random_subspace(n, k, 1000 + seed);
        const OrthonormalBasis Vp(V.Q * random_subspace(k, j, 1100 + seed).Q);
        const OrthonormalBasis X = random_subspace(n, 3, 1200 + seed);

        const PrincipalVectorPair outer = principal_angles(Vp, X);
        if (outer.angles.largest() >= kHalfPi - 1e-6) continue;

        const OrthonormalBasis W = orthonormal_range(V.Q.transpose() * X.Q);
        const OrthonormalBasis Hp = orthonormal_range(V.Q.transpose() * Vp.Q);
        const PrincipalVectorPair inner = principal_angles(Hp, W);

        REQUIRE(inner.angles.count() >= j);
        for (Index i = 0; i < j; ++i) {
            CHECK(inner.angles.angles(i) <= outer.angles.angles(i) + 1e-9);
        }
    }
}

// commuting self-adjoint images: sin distance grows at most by |B restricted
// off H'| * |B^+|
TEST_CASE("weighted image bound for commuting self-adjoint maps") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Index k = 6, j = 2;
        harness::Rng rng(harness::Rng::derive(1300 + seed, 0, 0));
        Vector d(k);
        for (Index i = 0; i < k; ++i) d(i) = 0.5 + rng.uniform() * 2.0;
        const Matrix B = d.asDiagonal();  // commutes with coordinate projections

        const OrthonormalBasis Hp(Matrix::Identity(k, k).leftCols(j));
        const OrthonormalBasis Wp = random_subspace(k, j, 1400 + seed);
        const OrthonormalBasis Tp = orthonormal_range(B * Wp.Q);
        if (Tp.dim() != j) continue;

        const double lhs2 = sin2_oracle(Hp, Tp);
        const double lhsF = sinF_oracle(Hp, Tp);
        const Matrix offH = B * (Matrix::Identity(k, k) - Hp.Q * Hp.Q.transpose());
        const double factor = spectral_norm(offH) * spectral_norm(pseudoinverse(B));
        CHECK(lhs2 <= factor * sin2_oracle(Hp, Wp) + 1e-9);
        CHECK(lhsF <= factor * sinF_oracle(Hp, Wp) + 1e-9);
    }
}

TEST_CASE("principal vector truncations give minimal angles") {
    const OrthonormalBasis S = random_subspace(9, 4, 1500);
    const OrthonormalBasis T = random_subspace(9, 4, 1501);
    const PrincipalVectorPair pair = principal_angles(S, T);
    const Index j = 2;
    const OrthonormalBasis Sj(pair.uBasis.Q.leftCols(j));
    const OrthonormalBasis Tj(pair.vBasis.Q.leftCols(j));
    const PrincipalVectorPair best = principal_angles(Sj, Tj);

    for (int trial = 0; trial < 50; ++trial) {
        const OrthonormalBasis Ssub(S.Q * random_subspace(4, j, 1600 + trial).Q);
        const OrthonormalBasis Tsub(T.Q * random_subspace(4, j, 1700 + trial).Q);
        const PrincipalVectorPair cand = principal_angles(Ssub, Tsub);
        for (Index i = 0; i < j; ++i) {
            CHECK(best.angles.angles(i) <= cand.angles.angles(i) + 1e-9);
        }
    }
}
