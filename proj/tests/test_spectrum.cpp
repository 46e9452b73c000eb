#include <doctest.h>

#include "krydom/spectrum.hpp"
#include "support.hpp"

using namespace krydom;
using namespace krydom::testing;

namespace {

Vector vec(std::initializer_list<double> vals) {
    Vector v(static_cast<Index>(vals.size()));
    Index i = 0;
    for (double x : vals) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("partition around an interior cluster") {
    const SpectrumPartition p = partition_at(vec({3, 2, 2, 1}), 2);
    CHECK(p.j == 1);
    CHECK(p.k == 3);
    CHECK(p.q0 == 1);
    REQUIRE(p.gammaJ.has_value());
    REQUIRE(p.gammaK.has_value());
    CHECK(*p.gammaJ == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(*p.gammaK == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(p.jIsZero());
    CHECK_FALSE(p.kIsRank());
}

TEST_CASE("partition at a true gap gives j = h-1 and k = h") {
    const SpectrumPartition p = partition_at(vec({3, 2, 1}), 2);
    CHECK(p.j == 1);
    CHECK(p.k == 2);
    CHECK(p.q0 == 1);
    REQUIRE(p.gammaK.has_value());
    CHECK(*p.gammaK == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fully degenerate spectrum omits both gap terms") {
    const SpectrumPartition p = partition_at(vec({2, 2, 2}), 2);
    CHECK(p.j == 0);
    CHECK(p.k == 3);
    CHECK(p.k == p.rank);
    CHECK(p.q0 == 0);
    CHECK_FALSE(p.gammaJ.has_value());
    CHECK_FALSE(p.gammaK.has_value());
    CHECK(p.jIsZero());
    CHECK(p.kIsRank());
}

TEST_CASE("h beyond the numerical rank is rejected") {
    CHECK_THROWS_AS(partition_at(vec({3, 2, 1}), 4), InvalidArgument);
    CHECK_THROWS_AS(partition_at(vec({3, 2, 0}), 3), InvalidArgument);
    CHECK_THROWS_AS(partition_at(vec({3, 2, 1}), 0), InvalidArgument);
}

TEST_CASE("trailing zeros are excluded from the clusters") {
    const SpectrumPartition p = partition_at(vec({3, 2, 2, 0, 0}), 2);
    CHECK(p.rank == 3);
    CHECK(p.k == 3);
    CHECK(p.kIsRank());
}

TEST_CASE("clusters are stable under doubling the tolerance") {
    // separations at least 10x the tie threshold keep decisions identical
    const Vector s = vec({5, 5, 4, 4, 4, 2, 1});
    const SpectrumPartition p1 = partition_at(s, 4, 1e-10);
    const SpectrumPartition p2 = partition_at(s, 4, 2e-10);
    CHECK(p1.clusters == p2.clusters);
    CHECK(p1.j == p2.j);
    CHECK(p1.k == p2.k);
}

TEST_CASE("near-ties within tolerance are merged") {
    Vector s = vec({3, 2, 2, 1});
    s(2) = 2.0 - 1e-12;  // still one cluster at tolerance 1e-10 * 3
    const SpectrumPartition p = partition_at(s, 2);
    CHECK(p.j == 1);
    CHECK(p.k == 3);
}

TEST_CASE("indices do not depend on the position of h inside its cluster") {
    const Vector s = vec({5, 4, 4, 4, 4, 1});
    for (Index h = 2; h <= 5; ++h) {
        const SpectrumPartition p = partition_at(s, h);
        CHECK(p.j == 1);
        CHECK(p.k == 5);
        CHECK(p.q0 == 1);
    }
}

TEST_CASE("partition_at accepts a factorization directly") {
    const Matrix A = clustered_matrix({3, 2, 2, 2, 1}, 8, 7, 5);
    const SVDFactorization svd = thin_svd(A);
    const SpectrumPartition p = partition_at(svd, 3);
    CHECK(p.j == 1);
    CHECK(p.k == 4);
    CHECK(p.rank == 5);
    CHECK(p.q0 == 1);
}
