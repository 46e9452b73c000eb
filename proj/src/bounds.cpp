#include "krydom/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "krydom/io.hpp"

namespace krydom {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 1.57079632679489661923;

Index rank_of(const Matrix& M, double rankTol) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    return thin_svd(M, rankTol).rank;
}

// Extends `chosen` (orthonormal columns inside span C) to `want` columns with
// further directions of span C.
Matrix complete_within(const Matrix& C, Matrix chosen, Index want) {
    if (chosen.cols() >= want) return chosen.leftCols(want);
    Matrix residual = C;
    if (chosen.cols() > 0) residual -= chosen * (chosen.transpose() * C);
    const OrthonormalBasis extra = orthonormal_range(residual);
    const Index need = std::min<Index>(want - chosen.cols(), extra.dim());
    Matrix out(C.rows(), chosen.cols() + need);
    out << chosen, extra.Q.leftCols(need);
    return out;
}

// Directions of span C closest to the target by principal angles, completed
// within span C when the target is too small to pair d directions.
Matrix closest_directions(const Matrix& C, const OrthonormalBasis& target, Index d) {
    if (target.dim() == 0) return complete_within(C, Matrix(C.rows(), 0), d);
    const PrincipalVectorPair pa = principal_angles(OrthonormalBasis(C), target);
    return complete_within(C, pa.uBasis.Q, d);
}

Matrix side_head(const SVDFactorization& svd, Side side, Index l) {
    return side == Side::Left ? svd.uHead(l) : svd.vHead(l);
}

Matrix side_tail(const SVDFactorization& svd, Side side, Index l) {
    return side == Side::Left ? svd.uTail(l) : svd.vTail(l);
}

SinTanNorms distance_to_space(const Matrix& witness, const OrthonormalBasis& space) {
    return sin_tan_theta_norms(OrthonormalBasis(witness), space);
}

bool pair_sound(double lhs2, double lhsF, double rhs2, double rhsF, double tol) {
    return lhs2 <= rhs2 + tol * (1.0 + rhs2) && lhsF <= rhsF + tol * (1.0 + rhsF);
}

/**
 * Constructive witness behind the order-q bound: compress the guess through
 * the head-k right block, push it through the filter, and glue the head-j
 * coordinate block to the filtered directions closest to its complement.
 * headU/headV are the k leading singular vector blocks of the side being
 * approximated / the guess side respectively.
 */
Matrix construction_witness(const Matrix& headU, const Matrix& headV, const Vector& sigmaHead,
                            Index j, Index h, const Matrix& M, const OddPolynomial& phi,
                            const OrthonormalBasis& align, double rankTol) {
    const Index k = headU.cols();
    const OrthonormalBasis W = orthonormal_range(headV.transpose() * M, rankTol);
    const Vector d = phi.apply(sigmaHead);
    const OrthonormalBasis Tfull = orthonormal_range(d.asDiagonal() * W.Q, rankTol);

    if (j == 0) {
        const Matrix C = headU * Tfull.Q;
        return closest_directions(C, align, h);
    }

    const OrthonormalBasis Hp(Matrix::Identity(k, k).leftCols(j));
    const PrincipalVectorPair paWH = principal_angles(W, Hp);
    const Matrix Wp = paWH.uBasis.Q;  // j columns in W
    const OrthonormalBasis Tp = orthonormal_range(d.asDiagonal() * Wp, rankTol);

    Matrix res = Tfull.Q;
    if (Tp.dim() > 0) res -= Tp.Q * (Tp.Q.transpose() * Tfull.Q);
    const OrthonormalBasis Tpp = orthonormal_range(res, rankTol);

    const Matrix HperpCols = Matrix::Identity(k, k).rightCols(k - j);
    Matrix Z;
    if (Tpp.dim() == 0) {
        Z = complete_within(HperpCols, Matrix(k, 0), h - j);
    } else {
        const PrincipalVectorPair paT = principal_angles(Tpp, OrthonormalBasis(HperpCols));
        Z = complete_within(HperpCols, paT.vBasis.Q, h - j);
    }

    Matrix coords(k, h);
    coords << Matrix::Identity(k, k).leftCols(j), Z;
    return headU * coords;
}

struct WitnessChoice {
    Matrix basis;
    std::string kind;
    SinTanNorms dist;
};

// Aligned witness first (tight in practice), the explicit construction as the
// guaranteed fall-back; keeps whichever first satisfies the bound, else the
// smaller achieved distance.
WitnessChoice choose_witness(const SVDFactorization& svd, const OrthonormalBasis& space,
                             Index h, Side side, const Matrix& guessForConstruction,
                             const OddPolynomial& phi, Index j, Index k, double rhs2,
                             double rhsF, double clusterTol, double rankTol) {
    WitnessChoice aligned;
    aligned.basis = best_dominant_subspace(svd, space, h, side, clusterTol).basis.Q;
    aligned.kind = "aligned";
    aligned.dist = distance_to_space(aligned.basis, space);
    if (pair_sound(aligned.dist.sin2, aligned.dist.sinF, rhs2, rhsF, 1e-8)) return aligned;

    WitnessChoice built;
    const Matrix headU = side_head(svd, side, k);
    const Matrix headV = side_head(svd, side == Side::Left ? Side::Right : Side::Left, k);
    built.basis = construction_witness(headU, headV, svd.sigmaHead(k), j, h,
                                       guessForConstruction, phi, space, rankTol);
    built.kind = "construction";
    built.dist = distance_to_space(built.basis, space);
    if (pair_sound(built.dist.sin2, built.dist.sinF, rhs2, rhsF, 1e-8)) return built;

    return built.dist.sinF < aligned.dist.sinF ? built : aligned;
}

void fill_common(BoundCertificate& cert, const SpectrumPartition& part, int q, int t,
                 double clusterTol, double rankTol) {
    cert.h = part.h;
    cert.j = part.j;
    cert.k = part.k;
    cert.q = q;
    cert.t = t;
    cert.gammaJ = part.gammaJ.value_or(0.0);
    cert.gammaK = part.gammaK.value_or(0.0);
    cert.clusterTol = clusterTol;
    cert.rankTol = rankTol;
}

void finish_certificate(BoundCertificate& cert, const WitnessChoice& w) {
    cert.lhs2 = w.dist.sin2;
    cert.lhsF = w.dist.sinF;
    cert.witness = w.basis;
    cert.witnessKind = w.kind;
    cert.hypothesesVerified = true;
}

void require_compatible(const SVDFactorization& svd, const Matrix& X, Index h,
                        double rankTol, double clusterTol, const char* where) {
    const HCompatibility hc = is_h_compatible(svd, X, h, rankTol, clusterTol);
    if (!hc.compatible) {
        throw NotCompatible(std::string(where) + ": the pair is not h-compatible at h=" +
                            std::to_string(h));
    }
}

void require_head_rank(const Matrix& head, const Matrix& W, Index ell, double rankTol,
                       const char* where) {
    if (ell == 0) return;
    if (rank_of(head.transpose() * W, rankTol) != ell) {
        throw NotCompatible(std::string(where) + ": head alignment rank below " +
                            std::to_string(ell));
    }
}

std::string json_bool(bool b) { return b ? "true" : "false"; }

std::string json_double_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += io::format_double(v[i]);
    }
    out += "]";
    return out;
}

}  // namespace

DominantSubspace best_dominant_subspace(const SVDFactorization& svd,
                                        const OrthonormalBasis& target, Index h, Side side,
                                        double clusterTol) {
    const SpectrumPartition part = partition_at(svd, h, clusterTol);
    const Matrix head = side_head(svd, side, part.j);

    DominantSubspace out;
    out.side = side;
    out.h = h;

    if (part.k == h) {
        out.basis = OrthonormalBasis(side_head(svd, side, h));
        return out;
    }

    const Matrix full = side_head(svd, side, part.k);
    const Matrix cluster = full.rightCols(part.k - part.j);
    const Matrix chosen = closest_directions(cluster, target, h - part.j);

    Matrix basis(full.rows(), h);
    basis << head, chosen;
    out.basis = OrthonormalBasis(std::move(basis));
    return out;
}

HCompatibility is_h_compatible(const SVDFactorization& svd, const Matrix& X, Index h,
                               double rankTol, double clusterTol) {
    require_finite(X, "is_h_compatible");
    if (h < 1 || h > svd.rank) {
        throw InvalidArgument("is_h_compatible: h must satisfy 1 <= h <= rank");
    }
    if (X.rows() != svd.cols()) {
        throw InvalidArgument("is_h_compatible: X row count must match the matrix column count");
    }

    const OrthonormalBasis Xr = orthonormal_range(X, rankTol);

    HCompatibility out;
    out.witness = best_dominant_subspace(svd, Xr, h, Side::Right, clusterTol);

    // rank of X^T S, scaled by ||X||_2: a cross product that vanishes to
    // roundoff must count as rank-deficient even though it is not exactly zero
    const Matrix XtS = X.transpose() * out.witness.basis.Q;
    const Vector svals = thin_svd(XtS).sigma;
    const double scale = spectral_norm(X);
    const double cutoff = rankTol * scale * std::max(XtS.rows(), XtS.cols());
    out.rankXS = 0;
    while (out.rankXS < svals.size() && svals(out.rankXS) > cutoff) ++out.rankXS;
    out.compatible = (out.rankXS == h);

    if (Xr.dim() == 0 || Xr.dim() < h) {
        out.marginAngle = 0.0;  // some direction of the witness is orthogonal to R(X)
    } else {
        const PrincipalVectorPair pa = principal_angles(out.witness.basis, Xr);
        out.marginAngle = kHalfPi - pa.angles.largest();
    }
    return out;
}

RawNorms raw_alignment_norms(const Matrix& head, const Matrix& tail, const Matrix& W,
                             double rankTol) {
    RawNorms out;
    const Matrix headW = head.transpose() * W;
    out.headRank = rank_of(headW, rankTol);
    const Matrix M = (tail.transpose() * W) * pseudoinverse(headW, rankTol);
    out.n2 = spectral_norm(M);
    out.nF = M.norm();
    return out;
}

double delta_denominator(int power, double gamma) {
    return std::exp2((2.0 * power + 1.0) * std::min(std::sqrt(gamma), 1.0));
}

DeflationCoefficient deflation_coefficient(const SVDFactorization& svd, const Matrix& W,
                                           int power, Index ell, Side side, double clusterTol,
                                           double rankTol, bool requireFullHeadRank) {
    require_finite(W, "deflation_coefficient");
    if (ell < 0 || ell > svd.rank) {
        throw InvalidArgument("deflation_coefficient: index out of range");
    }

    DeflationCoefficient out;
    out.power = power;
    out.index = ell;
    if (ell == 0 || ell == svd.rank) {
        out.omitted = true;  // the corresponding bound term is dropped
        return out;
    }

    const double gapAbs = svd.sigma(ell - 1) - svd.sigma(ell);
    if (!(gapAbs > clusterTol * svd.sigma(0))) {
        throw NoGapAtIndex("deflation_coefficient: no singular gap at the given index", ell);
    }
    out.gamma = gapAbs / svd.sigma(ell);

    const Matrix head = side_head(svd, side, ell);
    const Matrix tail = side_tail(svd, side, ell);
    if (requireFullHeadRank) {
        require_head_rank(head, W, ell, rankTol, "deflation_coefficient");
    }

    const RawNorms raw = raw_alignment_norms(head, tail, W, rankTol);
    out.raw2 = raw.n2;
    out.rawF = raw.nF;
    const double denom = delta_denominator(power, out.gamma);
    out.delta2 = 4.0 * raw.n2 / denom;
    out.deltaF = 4.0 * raw.nF / denom;
    return out;
}

ResidualCoefficient residual_coefficient(const SVDFactorization& svd, const OrthonormalBasis& Y,
                                         Index kIndex, double rankTol) {
    if (kIndex < 1 || kIndex > svd.rank) {
        throw InvalidArgument("residual_coefficient: index out of range");
    }
    if (Y.ambientDim() != svd.rows()) {
        throw InvalidArgument("residual_coefficient: basis ambient dimension mismatch");
    }
    // both factors have unit columns, so the alignment block vanishing means
    // its largest singular value sits at the roundoff floor
    const Matrix headY = svd.uHead(kIndex).transpose() * Y.Q;
    if (spectral_norm(headY) <= rankTol * std::max(headY.rows(), headY.cols())) {
        throw NotCompatible("residual_coefficient: U_k^T Y vanishes");
    }
    const Matrix M = (svd.uTail(kIndex).transpose() * Y.Q) * pseudoinverse(headY, rankTol);
    return ResidualCoefficient{spectral_norm(M), M.norm()};
}

bool ResidualSeries::nonIncreasing(double slack) const {
    for (std::size_t i = 1; i < val2.size(); ++i) {
        if (val2[i] > val2[i - 1] + slack * (1.0 + val2[i - 1])) return false;
        if (valF[i] > valF[i - 1] + slack * (1.0 + valF[i - 1])) return false;
    }
    return true;
}

ResidualSeries residual_series(const SVDFactorization& svd, const Matrix& X, Index h, int qFrom,
                               int qTo, double clusterTol, double rankTol) {
    if (qFrom < 0 || qTo < qFrom) throw InvalidArgument("residual_series: bad order range");
    const SpectrumPartition part = partition_at(svd, h, clusterTol);

    ResidualSeries out;
    out.kIndex = part.k;
    out.q0 = part.q0;
    out.qFrom = qFrom;

    const Matrix A = svd.reconstruct();
    KrylovBasis kb = krylov_basis(A, X, qFrom);
    for (int q = qFrom; q <= qTo; ++q) {
        if (q > qFrom) kb = extend(kb, A, X);
        const ResidualCoefficient rc = residual_coefficient(svd, kb.basis, part.k, rankTol);
        out.val2.push_back(rc.val2);
        out.valF.push_back(rc.valF);
    }
    return out;
}

bool BoundCertificate::sound(double tol) const {
    return pair_sound(lhs2, lhsF, rhs2, rhsF, tol);
}

std::string BoundCertificate::to_json(bool includeWitness) const {
    std::ostringstream os;
    os << "{\"theorem\":\"" << theoremId << "\""
       << ",\"h\":" << h << ",\"j\":" << j << ",\"k\":" << k << ",\"q\":" << q
       << ",\"t\":" << t << ",\"lhs2\":" << io::format_double(lhs2)
       << ",\"lhsF\":" << io::format_double(lhsF) << ",\"rhs2\":" << io::format_double(rhs2)
       << ",\"rhsF\":" << io::format_double(rhsF)
       << ",\"term1_2\":" << io::format_double(term1_2)
       << ",\"term1F\":" << io::format_double(term1F)
       << ",\"term2_2\":" << io::format_double(term2_2)
       << ",\"term2F\":" << io::format_double(term2F)
       << ",\"omittedFirst\":" << json_bool(omittedFirst)
       << ",\"omittedSecond\":" << json_bool(omittedSecond)
       << ",\"gammaJ\":" << io::format_double(gammaJ)
       << ",\"gammaK\":" << io::format_double(gammaK)
       << ",\"clusterTol\":" << io::format_double(clusterTol)
       << ",\"rankTol\":" << io::format_double(rankTol)
       << ",\"hypothesesVerified\":" << json_bool(hypothesesVerified)
       << ",\"sound\":" << json_bool(sound())
       << ",\"witnessKind\":\"" << witnessKind << "\"";
    os << ",\"secondaryLhsAngles\":" << json_double_array(secondaryLhsAngles);
    os << ",\"secondaryRhsAngles\":" << json_double_array(secondaryRhsAngles);
    if (includeWitness) {
        os << ",\"witness\":{\"rows\":" << witness.rows() << ",\"cols\":" << witness.cols()
           << ",\"columnMajor\":[";
        bool first = true;
        for (Index c = 0; c < witness.cols(); ++c) {
            for (Index r = 0; r < witness.rows(); ++r) {
                if (!first) os << ",";
                os << io::format_double(witness(r, c));
                first = false;
            }
        }
        os << "]}";
    }
    os << "}";
    return os.str();
}

BoundCertificate thm31_bound(const SVDFactorization& svd, const Matrix& X, Index h, int q,
                             const OddPolynomial& phi, double clusterTol, double rankTol) {
    require_finite(X, "thm31_bound");
    if (q < 0) throw InvalidArgument("thm31_bound: q must be non-negative");
    if (phi.degree() > 2 * q + 1) {
        throw InvalidArgument("thm31_bound: filter degree exceeds 2q+1");
    }
    const SpectrumPartition part = partition_at(svd, h, clusterTol);
    require_compatible(svd, X, h, rankTol, clusterTol, "thm31_bound");

    const Vector phiHead = phi.apply(svd.sigmaHead(part.k));
    for (Index i = 1; i < phiHead.size(); ++i) {
        if (phiHead(i) > phiHead(i - 1) + 1e-12 * std::abs(phiHead(0))) {
            throw InvalidArgument("thm31_bound: filter values not non-increasing on the head");
        }
    }
    if (!(phiHead(phiHead.size() - 1) > 0.0)) {
        throw InvalidArgument("thm31_bound: filter must stay positive on the head");
    }

    BoundCertificate cert;
    cert.theoremId = "T31";
    fill_common(cert, part, q, -1, clusterTol, rankTol);

    if (part.j >= 1) {
        const OrthonormalBasis W =
            orthonormal_range(svd.vHead(part.k).transpose() * X, rankTol);
        const OrthonormalBasis Hp(Matrix::Identity(part.k, part.k).leftCols(part.j));
        const SinTanNorms stn = sin_tan_theta_norms(Hp, W);
        cert.term1_2 = 4.0 * stn.sin2;
        cert.term1F = 4.0 * stn.sinF;

        const PrincipalVectorPair inner = principal_angles(Hp, W);
        const PrincipalVectorPair outer =
            principal_angles(OrthonormalBasis(svd.vHead(part.j)), orthonormal_range(X, rankTol));
        cert.secondaryLhsAngles.assign(inner.angles.angles.data(),
                                       inner.angles.angles.data() + inner.angles.count());
        cert.secondaryRhsAngles.assign(outer.angles.angles.data(),
                                       outer.angles.angles.data() + outer.angles.count());
    } else {
        cert.omittedFirst = true;
    }

    if (part.k < svd.rank) {
        const Vector phiTail = phi.apply(svd.sigmaTail(part.k));
        const double tailNorm = phiTail.size() ? phiTail.cwiseAbs().maxCoeff() : 0.0;
        const double headInvNorm = 1.0 / phiHead.minCoeff();
        const RawNorms raw =
            raw_alignment_norms(svd.vHead(part.k), svd.vTail(part.k), X, rankTol);
        cert.term2_2 = tailNorm * headInvNorm * raw.n2;
        cert.term2F = tailNorm * headInvNorm * raw.nF;
    } else {
        cert.omittedSecond = true;
    }

    cert.rhs2 = cert.term1_2 + cert.term2_2;
    cert.rhsF = cert.term1F + cert.term2F;

    const Matrix A = svd.reconstruct();
    const KrylovBasis kb = krylov_basis(A, X, q);
    if (kb.dim() < h) throw NotCompatible("thm31_bound: Krylov dimension below h");

    const WitnessChoice w = choose_witness(svd, kb.basis, h, Side::Left, X, phi, part.j, part.k,
                                           cert.rhs2, cert.rhsF, clusterTol, rankTol);
    finish_certificate(cert, w);
    return cert;
}

BoundCertificate cor32_bound(const SVDFactorization& svd, const Matrix& X, Index h, int q,
                             double clusterTol, double rankTol) {
    require_finite(X, "cor32_bound");
    if (q < 0) throw InvalidArgument("cor32_bound: q must be non-negative");
    const SpectrumPartition part = partition_at(svd, h, clusterTol);
    require_compatible(svd, X, h, rankTol, clusterTol, "cor32_bound");

    BoundCertificate cert;
    cert.theoremId = "C32";
    fill_common(cert, part, q, -1, clusterTol, rankTol);

    if (part.j >= 1) {
        const OrthonormalBasis Vj(svd.vHead(part.j));
        const SinTanNorms stn = sin_tan_theta_norms(Vj, orthonormal_range(X, rankTol));
        cert.term1_2 = 4.0 * stn.sin2;
        cert.term1F = 4.0 * stn.sinF;
    } else {
        cert.omittedFirst = true;
    }

    OddPolynomial phi = OddPolynomial::identity();
    if (part.k < svd.rank) {
        const DeflationCoefficient dc = deflation_coefficient(
            svd, X, q, part.k, Side::Right, clusterTol, rankTol, false);
        const double ratio = svd.sigma(part.k) / svd.sigma(part.k - 1);
        cert.term2_2 = dc.delta2 * ratio;
        cert.term2F = dc.deltaF * ratio;
        phi = build_amplifier(svd.sigma(part.k - 1), svd.sigma(part.k), q);
    } else {
        cert.omittedSecond = true;
    }

    cert.rhs2 = cert.term1_2 + cert.term2_2;
    cert.rhsF = cert.term1F + cert.term2F;

    const Matrix A = svd.reconstruct();
    const KrylovBasis kb = krylov_basis(A, X, q);
    if (kb.dim() < h) throw NotCompatible("cor32_bound: Krylov dimension below h");

    const WitnessChoice w = choose_witness(svd, kb.basis, h, Side::Left, X, phi, part.j, part.k,
                                           cert.rhs2, cert.rhsF, clusterTol, rankTol);
    finish_certificate(cert, w);
    return cert;
}

BoundCertificate thm33_bound(const SVDFactorization& svd, const Matrix& X, Index h, int q, int t,
                             double clusterTol, double rankTol) {
    require_finite(X, "thm33_bound");
    if (q < 0 || t < 0) throw InvalidArgument("thm33_bound: q and t must be non-negative");
    const SpectrumPartition part = partition_at(svd, h, clusterTol);
    require_compatible(svd, X, h, rankTol, clusterTol, "thm33_bound");

    BoundCertificate cert;
    cert.theoremId = "T33";
    fill_common(cert, part, q, t, clusterTol, rankTol);

    if (part.j >= 1) {
        const DeflationCoefficient dj =
            deflation_coefficient(svd, X, q, part.j, Side::Right, clusterTol, rankTol);
        const double ratio = svd.sigma(part.j) / svd.sigma(part.j - 1);
        cert.term1_2 = 4.0 * dj.delta2 * ratio;
        cert.term1F = 4.0 * dj.deltaF * ratio;
    } else {
        cert.omittedFirst = true;
    }

    const Matrix A = svd.reconstruct();
    const KrylovBasis kq = krylov_basis(A, X, q);
    if (kq.dim() < h) throw NotCompatible("thm33_bound: Krylov dimension below h");

    if (part.k < svd.rank) {
        const DeflationCoefficient dk = deflation_coefficient(
            svd, kq.basis.Q, t, part.k, Side::Left, clusterTol, rankTol, false);
        const double ratio = svd.sigma(part.k) / svd.sigma(part.k - 1);
        cert.term2_2 = dk.delta2 * ratio;
        cert.term2F = dk.deltaF * ratio;
    } else {
        cert.omittedSecond = true;
    }

    cert.rhs2 = cert.term1_2 + cert.term2_2;
    cert.rhsF = cert.term1F + cert.term2F;

    const KrylovBasis kqt = krylov_basis(A.transpose(), kq.basis.Q, t);
    if (kqt.dim() < h) throw NotCompatible("thm33_bound: augmented subspace dimension below h");

    OddPolynomial phi = part.k < svd.rank
                            ? build_amplifier(svd.sigma(part.k - 1), svd.sigma(part.k), t)
                            : OddPolynomial::identity();
    const WitnessChoice w = choose_witness(svd, kqt.basis, h, Side::Right, kq.basis.Q, phi,
                                           part.j, part.k, cert.rhs2, cert.rhsF, clusterTol,
                                           rankTol);
    finish_certificate(cert, w);
    return cert;
}

BoundCertificate thm34_bound(const SVDFactorization& svd, const Matrix& X, Index h, int q, int t,
                             double clusterTol, double rankTol) {
    require_finite(X, "thm34_bound");
    if (q < 0 || t < 0) throw InvalidArgument("thm34_bound: q and t must be non-negative");
    const SpectrumPartition part = partition_at(svd, h, clusterTol);
    require_compatible(svd, X, h, rankTol, clusterTol, "thm34_bound");

    BoundCertificate cert;
    cert.theoremId = "T34";
    fill_common(cert, part, q, t, clusterTol, rankTol);

    const Matrix A = svd.reconstruct();
    const Matrix Z = A * X;

    if (part.j >= 1) {
        const DeflationCoefficient dj =
            deflation_coefficient(svd, Z, q, part.j, Side::Left, clusterTol, rankTol);
        const double ratio = svd.sigma(part.j) / svd.sigma(part.j - 1);
        cert.term1_2 = 4.0 * dj.delta2 * ratio;
        cert.term1F = 4.0 * dj.deltaF * ratio;
    } else {
        cert.omittedFirst = true;
    }

    const KrylovBasis wq = krylov_basis(A.transpose(), Z, q);
    if (wq.dim() < h) throw NotCompatible("thm34_bound: Krylov dimension below h");

    if (part.k < svd.rank) {
        const DeflationCoefficient dk = deflation_coefficient(
            svd, wq.basis.Q, t, part.k, Side::Right, clusterTol, rankTol, false);
        const double ratio = svd.sigma(part.k) / svd.sigma(part.k - 1);
        cert.term2_2 = dk.delta2 * ratio;
        cert.term2F = dk.deltaF * ratio;
    } else {
        cert.omittedSecond = true;
    }

    cert.rhs2 = cert.term1_2 + cert.term2_2;
    cert.rhsF = cert.term1F + cert.term2F;

    const KrylovBasis kdeep = krylov_basis(A, X, q + t + 1);
    if (kdeep.dim() < h) throw NotCompatible("thm34_bound: Krylov dimension below h");

    OddPolynomial phi = part.k < svd.rank
                            ? build_amplifier(svd.sigma(part.k - 1), svd.sigma(part.k), t)
                            : OddPolynomial::identity();
    const WitnessChoice w = choose_witness(svd, kdeep.basis, h, Side::Left, wq.basis.Q, phi,
                                           part.j, part.k, cert.rhs2, cert.rhsF, clusterTol,
                                           rankTol);
    finish_certificate(cert, w);
    return cert;
}

std::optional<OrthonormalBasis> exhaustive_witness_search(
    const SVDFactorization& svd, const OrthonormalBasis& space, Index h, Side side,
    double rhs2, double rhsF, double tol, double clusterTol) {
    const SpectrumPartition part = partition_at(svd, h, clusterTol);
    const Index w = part.k - part.j;
    const Index d = h - part.j;
    if (w == d) return std::nullopt;  // unique witness, nothing to search
    if (w > 4 || std::min(d, w - d) != 1) return std::nullopt;

    const Matrix headJ = side_head(svd, side, part.j);
    const Matrix cluster = side_head(svd, side, part.k).rightCols(w);

    // residuals of the candidate generators against the space
    auto project_out = [&space](const Matrix& M) {
        return M - space.Q * (space.Q.transpose() * M);
    };
    const Matrix Pj = project_out(headJ);
    const Matrix Pc = project_out(cluster);

    const bool lineIsWitness = (d == 1);
    const int steps = 180;
    std::vector<double> phis(static_cast<std::size_t>(w) - 1, 0.0);

    auto unit_from_angles = [&](Vector& v) {
        double prod = 1.0;
        for (Index i = 0; i + 1 < w; ++i) {
            v(i) = prod * std::cos(phis[i]);
            prod *= std::sin(phis[i]);
        }
        v(w - 1) = prod;
    };

    Vector v(w);
    std::vector<std::size_t> counter(static_cast<std::size_t>(w) - 1, 0);
    const std::size_t total = [&] {
        std::size_t n = 1;
        for (Index i = 0; i + 1 < w; ++i) n *= steps;
        return n;
    }();

    Matrix residual(headJ.rows(), h);
    residual.leftCols(part.j) = Pj;

    for (std::size_t it = 0; it < total; ++it) {
        for (std::size_t i = 0; i < counter.size(); ++i) {
            phis[i] = kPi * static_cast<double>(counter[i]) / steps;
        }
        unit_from_angles(v);

        Matrix coeff;  // cluster coordinates of the free directions
        if (lineIsWitness) {
            coeff = v;
        } else {
            // witness = cluster minus the line v: Householder completion of v
            Eigen::HouseholderQR<Matrix> qr(v);
            const Matrix full = qr.householderQ() * Matrix::Identity(w, w);
            coeff = full.rightCols(w - 1);
        }
        residual.rightCols(d) = Pc * coeff;

        Eigen::JacobiSVD<Matrix> sres(residual);
        const double lhs2 = sres.singularValues()(0);
        const double lhsF = residual.norm();
        if (pair_sound(lhs2, lhsF, rhs2, rhsF, tol)) {
            Matrix candidate(headJ.rows(), h);
            candidate << headJ, cluster * coeff;
            return OrthonormalBasis(candidate);
        }

        // odometer increment
        for (std::size_t i = 0; i < counter.size(); ++i) {
            if (++counter[i] < static_cast<std::size_t>(steps)) break;
            counter[i] = 0;
        }
    }
    return std::nullopt;
}

bool certify_with_fallback(BoundCertificate& cert, const SVDFactorization& svd,
                           const OrthonormalBasis& space, Side side, double tol) {
    if (cert.sound(tol)) return true;
    const auto found = exhaustive_witness_search(svd, space, cert.h, side, cert.rhs2, cert.rhsF,
                                                 tol, cert.clusterTol);
    if (!found) return false;
    const SinTanNorms stn = sin_tan_theta_norms(*found, space);
    cert.lhs2 = stn.sin2;
    cert.lhsF = stn.sinF;
    cert.witness = found->Q;
    cert.witnessKind = "grid";
    return cert.sound(tol);
}

}  // namespace krydom
