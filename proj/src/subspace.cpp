#include "krydom/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace krydom {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;
// Cosine/sine route switch: cos(theta) > 1/sqrt(2) means the sine route wins.
constexpr double kRouteSwitch = 0.70710678118654752440;
constexpr double kRightAngleTol = 1e-12;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

PrincipalVectorPair principal_angles(const OrthonormalBasis& S, const OrthonormalBasis& T) {
    if (S.ambientDim() != T.ambientDim()) {
        throw InvalidArgument("principal_angles: ambient dimensions differ");
    }
    if (S.dim() < 1 || T.dim() < 1) {
        throw InvalidArgument("principal_angles: subspaces must have dimension >= 1");
    }

    const Index d = std::min(S.dim(), T.dim());
    const SVDFactorization cosSvd = thin_svd(S.Q.transpose() * T.Q);

    PrincipalAngles pa;
    pa.angles.resize(d);
    pa.cosines.resize(d);
    pa.sines.resize(d);

    // Sine route on the smaller subspace: singular values of (I - P_big) Q_small
    // are the sines in non-increasing order.
    const bool sIsSmall = S.dim() <= T.dim();
    const Matrix& big = sIsSmall ? T.Q : S.Q;
    const Matrix& small = sIsSmall ? S.Q : T.Q;
    const Matrix residual = small - big * (big.transpose() * small);
    Vector sineVals;
    {
        Eigen::JacobiSVD<Matrix> svd(residual);
        sineVals = svd.singularValues();  // length d, non-increasing
    }

    for (Index i = 0; i < d; ++i) {
        const double c = clamp01(cosSvd.sigma(i));
        double theta;
        if (c > kRouteSwitch) {
            theta = std::asin(clamp01(sineVals(d - 1 - i)));
        } else {
            theta = std::acos(c);
        }
        theta = std::min(kHalfPi, std::max(0.0, theta));
        pa.angles(i) = theta;
        pa.cosines(i) = std::cos(theta);
        pa.sines(i) = std::sin(theta);
    }

    PrincipalVectorPair pair;
    pair.uBasis = OrthonormalBasis(S.Q * cosSvd.U.leftCols(d));
    pair.vBasis = OrthonormalBasis(T.Q * cosSvd.V.leftCols(d));
    pair.angles = std::move(pa);
    return pair;
}

SinTanNorms sin_tan_theta_norms(const OrthonormalBasis& S, const OrthonormalBasis& T) {
    if (S.dim() > T.dim()) {
        throw InvalidArgument(
            "sin_tan_theta_norms: dim S must not exceed dim T (roles are not symmetric)");
    }
    const PrincipalVectorPair pair = principal_angles(S, T);
    const PrincipalAngles& pa = pair.angles;

    SinTanNorms out;
    out.sin2 = pa.sines.size() ? pa.sines.maxCoeff() : 0.0;
    out.sinF = pa.sines.norm();

    for (Index i = 0; i < pa.count(); ++i) {
        if (pa.angles(i) >= kHalfPi - kRightAngleTol) {
            out.tanInfinite = true;
        }
    }
    if (out.tanInfinite) {
        out.tan2 = std::numeric_limits<double>::infinity();
        out.tanF = std::numeric_limits<double>::infinity();
    } else {
        double sumSq = 0.0;
        double maxTan = 0.0;
        for (Index i = 0; i < pa.count(); ++i) {
            const double t = std::tan(pa.angles(i));
            maxTan = std::max(maxTan, t);
            sumSq += t * t;
        }
        out.tan2 = maxTan;
        out.tanF = std::sqrt(sumSq);
    }
    return out;
}

}  // namespace krydom
