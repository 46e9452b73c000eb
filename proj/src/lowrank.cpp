#include "krydom/lowrank.hpp"

#include <cmath>
#include <sstream>

#include "krydom/io.hpp"

namespace krydom {

namespace {

// tail errors of the exact factorization: ||A - A_i||_2 = sigma_{i+1},
// ||A - A_i||_F = sqrt(sum_{l>i} sigma_l^2)
void optimal_errors(const Vector& sigma, Index h, std::vector<double>& opt2,
                    std::vector<double>& optF) {
    opt2.resize(h);
    optF.resize(h);
    for (Index i = 1; i <= h; ++i) {
        opt2[i - 1] = (i < sigma.size()) ? sigma(i) : 0.0;
        double s = 0.0;
        for (Index l = i; l < sigma.size(); ++l) s += sigma(l) * sigma(l);
        optF[i - 1] = std::sqrt(s);
    }
}

}  // namespace

ApproxError approx_error(const Matrix& A, const OrthonormalBasis& U) {
    require_finite(A, "approx_error");
    if (U.ambientDim() != A.rows()) {
        throw InvalidArgument("approx_error: basis ambient dimension mismatch");
    }
    Matrix R = A;
    if (U.dim() > 0) R -= U.Q * (U.Q.transpose() * A);
    return ApproxError{spectral_norm(R), R.norm()};
}

LowRankResult proto_algorithm(const Matrix& A, const Matrix& X, Index h, int ell,
                              double rankTol) {
    require_finite(A, "proto_algorithm");
    require_finite(X, "proto_algorithm");
    if (h < 1) throw InvalidArgument("proto_algorithm: h must be positive");
    if (ell < 0) throw InvalidArgument("proto_algorithm: power parameter must be non-negative");

    const KrylovBasis kb = krylov_basis(A, X, ell, rankTol);
    const Index d = kb.dim();
    if (d < h) {
        throw InsufficientKrylovRank(
            "proto_algorithm: Krylov block rank " + std::to_string(d) +
                " below target rank " + std::to_string(h),
            d);
    }

    const Matrix UK = kb.basis.Q;       // m x d
    const Matrix W = UK.transpose() * A;  // d x n
    const SVDFactorization wSvd = thin_svd(W);

    LowRankResult out;
    out.uHat = UK * wSvd.uHead(h);
    out.krylovDim = d;
    out.powerParameter = ell;

    out.errors2.resize(h);
    out.errorsF.resize(h);
    for (Index i = 1; i <= h; ++i) {
        const ApproxError e = approx_error(A, OrthonormalBasis(out.uHat.leftCols(i)));
        out.errors2[i - 1] = e.err2;
        out.errorsF[i - 1] = e.errF;
    }
    optimal_errors(thin_svd(A).sigma, h, out.optErrors2, out.optErrorsF);
    return out;
}

LowRankCertificate lowrank_certificate(const SVDFactorization& svd, const Matrix& X, Index h,
                                       int q, int t, double theta0, double clusterTol,
                                       double rankTol) {
    require_finite(X, "lowrank_certificate");
    if (q < 0 || t < 0) throw InvalidArgument("lowrank_certificate: q, t must be non-negative");
    if (!(theta0 > 0.0) || !(theta0 < 1.57079632679489661923)) {
        throw InvalidArgument("lowrank_certificate: theta0 must lie in (0, pi/2)");
    }
    const SpectrumPartition part = partition_at(svd, h, clusterTol);
    {
        const HCompatibility hc = is_h_compatible(svd, X, h, rankTol, clusterTol);
        if (!hc.compatible) {
            throw NotCompatible("lowrank_certificate: the pair is not h-compatible");
        }
    }

    const Matrix A = svd.reconstruct();

    double cond = 0.0, deltaFactorF = 0.0;
    if (part.j >= 1) {
        const DeflationCoefficient dj =
            deflation_coefficient(svd, X, q, part.j, Side::Right, clusterTol, rankTol);
        const double ratio = svd.sigma(part.j) / svd.sigma(part.j - 1);
        cond += 4.0 * dj.delta2 * ratio;
        deltaFactorF += 4.0 * dj.deltaF * ratio;
    }
    const KrylovBasis kq = krylov_basis(A, X, q);
    if (kq.dim() < h) throw NotCompatible("lowrank_certificate: Krylov dimension below h");
    if (part.k < svd.rank) {
        const DeflationCoefficient dk = deflation_coefficient(
            svd, kq.basis.Q, t, part.k, Side::Left, clusterTol, rankTol, false);
        const double ratio = svd.sigma(part.k) / svd.sigma(part.k - 1);
        cond += dk.delta2 * ratio;
        deltaFactorF += dk.deltaF * ratio;
    }

    LowRankCertificate out;
    out.result = proto_algorithm(A, X, h, q + t + 1);
    out.result.certified = true;
    out.result.theta0 = theta0;
    out.result.conditionLHS = cond;
    out.result.applicable = (cond <= std::sin(theta0));

    out.result.deltas.resize(h);
    for (Index i = 1; i <= h; ++i) {
        const double opt2 = out.result.optErrors2[i - 1];
        out.result.deltas[i - 1] = opt2 * deltaFactorF / std::cos(theta0);
    }

    BoundCertificate& cert = out.cert;
    cert.theoremId = "T37";
    cert.h = part.h;
    cert.j = part.j;
    cert.k = part.k;
    cert.q = q;
    cert.t = t;
    cert.gammaJ = part.gammaJ.value_or(0.0);
    cert.gammaK = part.gammaK.value_or(0.0);
    cert.omittedFirst = part.jIsZero();
    cert.omittedSecond = part.kIsRank();
    cert.clusterTol = clusterTol;
    cert.rankTol = rankTol;
    cert.term1_2 = cond;          // condition value (spectral route)
    cert.term1F = deltaFactorF;   // excess factor (Frobenius route)
    cert.hypothesesVerified = true;
    cert.witness = out.result.uHat;
    cert.witnessKind = "proto";

    // lhs: worst prefix excess over optimal + delta; rhs 0 by convention
    double worst2 = -1.0, worstF = -1.0;
    for (Index i = 0; i < h; ++i) {
        worst2 = std::max(worst2, out.result.errors2[i] - out.result.optErrors2[i] -
                                      out.result.deltas[i]);
        worstF = std::max(worstF, out.result.errorsF[i] - out.result.optErrorsF[i] -
                                      out.result.deltas[i]);
    }
    cert.lhs2 = worst2;
    cert.lhsF = worstF;
    cert.rhs2 = 0.0;
    cert.rhsF = 0.0;
    return out;
}

Matrix best_rank_i_from_range(const Matrix& C, const Matrix& A, Index i, NormSelector xi,
                              double rankTol) {
    require_finite(C, "best_rank_i_from_range");
    require_finite(A, "best_rank_i_from_range");
    if (C.rows() != A.rows()) throw InvalidArgument("best_rank_i_from_range: row mismatch");
    if (i < 0) throw InvalidArgument("best_rank_i_from_range: negative rank");
    const OrthonormalBasis Q = orthonormal_range(C, rankTol);
    if (i > Q.dim()) {
        throw InvalidArgument("best_rank_i_from_range: rank exceeds rank of the range matrix");
    }
    if (i == 0) return Matrix::Zero(A.rows(), A.cols());
    (void)xi;  // the Frobenius-optimal truncation serves both selectors
    return Q.Q * truncated_svd_approx(Q.Q.transpose() * A, i);
}

std::string LowRankResult::to_json(bool includeUHat) const {
    std::ostringstream os;
    auto arr = [](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            s += io::format_double(v[i]);
        }
        return s + "]";
    };
    os << "{\"h\":" << uHat.cols() << ",\"krylovDim\":" << krylovDim
       << ",\"powerParameter\":" << powerParameter << ",\"errors2\":" << arr(errors2)
       << ",\"errorsF\":" << arr(errorsF) << ",\"optErrors2\":" << arr(optErrors2)
       << ",\"optErrorsF\":" << arr(optErrorsF) << ",\"certified\":"
       << (certified ? "true" : "false") << ",\"applicable\":" << (applicable ? "true" : "false")
       << ",\"deltas\":" << arr(deltas)
       << ",\"conditionLHS\":" << io::format_double(conditionLHS)
       << ",\"theta0\":" << io::format_double(theta0);
    if (includeUHat) {
        os << ",\"uHat\":{\"rows\":" << uHat.rows() << ",\"cols\":" << uHat.cols()
           << ",\"columnMajor\":[";
        bool first = true;
        for (Index c = 0; c < uHat.cols(); ++c) {
            for (Index r = 0; r < uHat.rows(); ++r) {
                if (!first) os << ",";
                os << io::format_double(uHat(r, c));
                first = false;
            }
        }
        os << "]}";
    }
    os << "}";
    return os.str();
}

}  // namespace krydom
