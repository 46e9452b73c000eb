#ifndef KRYDOM_TESTS_SUPPORT_HPP
#define KRYDOM_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "krydom/harness.hpp"
#include "krydom/matrix_core.hpp"

namespace krydom::testing {

inline Matrix seeded_matrix(Index rows, Index cols, std::uint64_t seed) {
    harness::Rng rng(harness::Rng::derive(seed, 10, 0));
    return harness::gaussian_matrix(rows, cols, rng);
}

inline OrthonormalBasis random_subspace(Index ambient, Index dim, std::uint64_t seed) {
    return orthonormal_range(seeded_matrix(ambient, dim, seed));
}

inline Matrix clustered_matrix(const std::vector<double>& sigma, Index rows, Index cols,
                               std::uint64_t seed) {
    harness::SpectrumSpec spec;
    spec.values = sigma;
    return harness::generate_test_matrix(spec, rows, cols, seed);
}

inline Matrix haar_rotation_block(Index n, std::uint64_t seed) {
    harness::Rng rng(harness::Rng::derive(seed, 20, 0));
    return harness::haar_orthogonal(n, rng);
}

// Independent one-sided Jacobi reference: rotates column pairs of a working
// copy until all columns are mutually orthogonal; the singular values are the
// final column norms. No bidiagonalization anywhere.
inline Vector jacobi_singular_values(Matrix A, int maxSweeps = 60) {
    const Index n = A.cols();
    for (int sweep = 0; sweep < maxSweeps; ++sweep) {
        double off = 0.0;
        for (Index p = 0; p < n - 1; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const double alpha = A.col(p).squaredNorm();
                const double beta = A.col(q).squaredNorm();
                const double gamma = A.col(p).dot(A.col(q));
                off = std::max(off, std::abs(gamma) / std::max(1e-300, std::sqrt(alpha * beta)));
                if (gamma == 0.0) continue;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double sign = zeta >= 0.0 ? 1.0 : -1.0;
                const double tt = sign / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + tt * tt);
                const double s = c * tt;
                const Vector colP = A.col(p);
                A.col(p) = c * colP - s * A.col(q);
                A.col(q) = s * colP + c * A.col(q);
            }
        }
        if (off < 1e-15) break;
    }
    Vector sv(n);
    for (Index j = 0; j < n; ++j) sv(j) = A.col(j).norm();
    std::sort(sv.data(), sv.data() + n, std::greater<double>());
    return sv;
}

inline double sin_theta_F(const OrthonormalBasis& small, const OrthonormalBasis& big) {
    const Matrix R = small.Q - big.Q * (big.Q.transpose() * small.Q);
    return R.norm();
}

inline double sin_theta_2(const OrthonormalBasis& small, const OrthonormalBasis& big) {
    const Matrix R = small.Q - big.Q * (big.Q.transpose() * small.Q);
    return spectral_norm(R);
}

}  // namespace krydom::testing

#endif
