#include "krydom/spectrum.hpp"

#include <cmath>
#include <string>

namespace krydom {

namespace {

SpectrumPartition partition_core(const Vector& sigma, Index h, double clusterTol, Index rank) {
    if (rank < 1) throw InvalidArgument("partition_at: spectrum has numerical rank 0");
    if (h < 1 || h > rank) {
        throw InvalidArgument("partition_at: h must satisfy 1 <= h <= rank, got h=" +
                              std::to_string(h) + " with rank=" + std::to_string(rank));
    }
    for (Index i = 1; i < sigma.size(); ++i) {
        if (sigma(i) > sigma(i - 1)) {
            throw InvalidArgument("partition_at: sigma must be non-increasing");
        }
    }
    if (sigma(sigma.size() - 1) < 0.0) {
        throw InvalidArgument("partition_at: sigma must be non-negative");
    }

    SpectrumPartition part;
    part.h = h;
    part.rank = rank;
    part.clusterTol = clusterTol;

    const double tie = clusterTol * sigma(0);

    // Clusters over 1..rank, chaining neighbours within the tie tolerance.
    Index start = 1;
    for (Index i = 2; i <= rank; ++i) {
        if (sigma(i - 2) - sigma(i - 1) > tie) {
            part.clusters.emplace_back(start, i - 1);
            start = i;
        }
    }
    part.clusters.emplace_back(start, rank);

    Index clusterOfH = -1;
    for (Index c = 0; c < static_cast<Index>(part.clusters.size()); ++c) {
        if (part.clusters[c].first <= h && h <= part.clusters[c].second) {
            clusterOfH = c;
            break;
        }
    }

    part.j = part.clusters[clusterOfH].first - 1;
    part.k = part.clusters[clusterOfH].second;
    part.q0 = clusterOfH;
    if (part.q0 >= h) throw InvalidArgument("partition_at: q0 < h violated");

    if (part.j >= 1) {
        part.gammaJ = (sigma(part.j - 1) - sigma(part.j)) / sigma(part.j);
    }
    if (part.k < rank) {
        part.gammaK = (sigma(part.k - 1) - sigma(part.k)) / sigma(part.k);
    }
    return part;
}

}  // namespace

SpectrumPartition partition_at(const Vector& sigma, Index h, double clusterTol, double rankTol) {
    if (sigma.size() == 0) throw InvalidArgument("partition_at: empty spectrum");
    const Index rank = numerical_rank(sigma, rankTol, sigma.size());
    return partition_core(sigma, h, clusterTol, rank);
}

SpectrumPartition partition_at(const SVDFactorization& svd, Index h, double clusterTol) {
    return partition_core(svd.sigma, h, clusterTol, svd.rank);
}

}  // namespace krydom
