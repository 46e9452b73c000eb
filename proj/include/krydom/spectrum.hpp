#ifndef KRYDOM_SPECTRUM_HPP
#define KRYDOM_SPECTRUM_HPP

#include <optional>
#include <vector>

#include "krydom/matrix_core.hpp"

namespace krydom {

/**
 * Index machinery around a target index h inside the singular spectrum.
 * All indices are 1-based like the sigma subscripts: j is the nearest index
 * below h with a gap (0 when sigma_1 already sits in h's cluster), k is the
 * last index of h's cluster. Equality of singular values is decided by
 * |sigma_a - sigma_b| <= clusterTol * sigma_1 chained over neighbours.
 *
 * gammaJ/gammaK are the relative gaps at j and k; they are absent exactly
 * when the corresponding bound term must be omitted (j == 0, k == rank).
 * sigma_0 is conceptually +infinity and never enters arithmetic.
 */
struct SpectrumPartition {
    Index h = 0;
    Index j = 0;
    Index k = 0;
    std::optional<double> gammaJ;
    std::optional<double> gammaK;
    Index q0 = 0;  // distinct values among sigma_1..sigma_h, minus one
    Index rank = 0;
    double clusterTol = kDefaultClusterTol;
    // Clusters of equal values over 1..rank as half-open 1-based [first, last].
    std::vector<std::pair<Index, Index>> clusters;

    bool jIsZero() const { return j == 0; }
    bool kIsRank() const { return k == rank; }
};

SpectrumPartition partition_at(const Vector& sigma, Index h,
                               double clusterTol = kDefaultClusterTol,
                               double rankTol = kDefaultRankTol);

SpectrumPartition partition_at(const SVDFactorization& svd, Index h,
                               double clusterTol = kDefaultClusterTol);

}  // namespace krydom

#endif
