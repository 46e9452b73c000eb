#include "krydom/amplifier.hpp"

#include <cmath>
#include <string>

namespace krydom {

namespace {

// First-kind Chebyshev value, split into cos/cosh branches at |y| = 1.
double chebyshev_value(int d, double y) {
    const double a = std::abs(y);
    double t;
    if (a <= 1.0) {
        t = std::cos(d * std::acos(std::min(1.0, a)));
    } else {
        t = std::cosh(d * std::acosh(a));
    }
    if (y < 0.0 && (d % 2 != 0)) t = -t;
    return t;
}

// Integer coefficient expansion of T_d via the three-term recurrence.
std::vector<double> chebyshev_coefficients(int d) {
    std::vector<std::vector<double>> T(d + 1);
    T[0] = {1.0};
    if (d >= 1) T[1] = {0.0, 1.0};
    for (int n = 2; n <= d; ++n) {
        std::vector<double> c(n + 1, 0.0);
        for (std::size_t i = 0; i < T[n - 1].size(); ++i) c[i + 1] += 2.0 * T[n - 1][i];
        for (std::size_t i = 0; i < T[n - 2].size(); ++i) c[i] -= T[n - 2][i];
        T[n] = std::move(c);
    }
    return T[d];
}

}  // namespace

OddPolynomial OddPolynomial::identity() { return from_odd_coefficients({1.0}); }

OddPolynomial OddPolynomial::from_odd_coefficients(std::vector<double> coeffs) {
    if (coeffs.empty()) throw InvalidArgument("OddPolynomial: empty coefficient list");
    OddPolynomial p;
    p.chebyshev_ = false;
    p.coeffs_ = std::move(coeffs);
    p.degree_ = 2 * static_cast<int>(p.coeffs_.size()) - 1;
    return p;
}

OddPolynomial OddPolynomial::chebyshev_amplifier(double sigmaK, double sigmaK1, int q) {
    if (!(sigmaK > sigmaK1) || !(sigmaK1 > 0.0)) {
        throw InvalidArgument("build_amplifier: requires sigmaK > sigmaK1 > 0 (no gap to amplify)");
    }
    if (q < 0) throw InvalidArgument("build_amplifier: q must be non-negative");
    OddPolynomial p;
    p.chebyshev_ = true;
    p.sigmaK_ = sigmaK;
    p.sigmaK1_ = sigmaK1;
    p.q_ = q;
    p.degree_ = 2 * q + 1;
    return p;
}

int OddPolynomial::q() const {
    if (!chebyshev_) throw InvalidArgument("OddPolynomial: q only defined for Chebyshev form");
    return q_;
}

double OddPolynomial::sigmaK() const {
    if (!chebyshev_) throw InvalidArgument("OddPolynomial: sigmaK only defined for Chebyshev form");
    return sigmaK_;
}

double OddPolynomial::sigmaK1() const {
    if (!chebyshev_) throw InvalidArgument("OddPolynomial: sigmaK1 only defined for Chebyshev form");
    return sigmaK1_;
}

double OddPolynomial::operator()(double x) const {
    if (chebyshev_) {
        const double scale = sigmaK_ / chebyshev_value(degree_, sigmaK_ / sigmaK1_);
        return scale * chebyshev_value(degree_, x / sigmaK1_);
    }
    // Horner in x^2 on the odd coefficients
    const double x2 = x * x;
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x2 + *it;
    return acc * x;
}

Vector OddPolynomial::apply(const Vector& sigma) const {
    Vector out(sigma.size());
    for (Index i = 0; i < sigma.size(); ++i) out(i) = (*this)(sigma(i));
    return out;
}

std::vector<double> OddPolynomial::odd_coefficients() const {
    if (!chebyshev_) return coeffs_;
    if (q_ > 4) {
        throw InvalidArgument(
            "OddPolynomial: expanded coefficients not exposed for Chebyshev q > 4");
    }
    const std::vector<double> full = chebyshev_coefficients(degree_);
    const double scale = sigmaK_ / chebyshev_value(degree_, sigmaK_ / sigmaK1_);
    std::vector<double> odd;
    for (int pw = 1; pw <= degree_; pw += 2) {
        odd.push_back(scale * full[pw] / std::pow(sigmaK1_, pw));
    }
    return odd;
}

OddPolynomial build_amplifier(double sigmaK, double sigmaK1, int q) {
    return OddPolynomial::chebyshev_amplifier(sigmaK, sigmaK1, q);
}

Matrix apply_odd_polynomial(const Matrix& A, const OddPolynomial& phi, const Matrix& X) {
    require_finite(A, "apply_odd_polynomial");
    require_finite(X, "apply_odd_polynomial");
    if (A.cols() != X.rows()) {
        throw InvalidArgument("apply_odd_polynomial: A.cols() != X.rows()");
    }

    if (phi.isChebyshev()) {
        // Interleaved recurrence through odd (m-side) and even (n-side) levels:
        //   R_{2i+1} = (2/s) A S_{2i} - R_{2i-1},  S_{2i+2} = (2/s) A^T R_{2i+1} - S_{2i}
        const double s = phi.sigmaK1();
        Matrix evenPrev = X;            // level T_0
        Matrix odd = (A * X) / s;       // level T_1
        for (int i = 0; i < phi.q(); ++i) {
            Matrix evenNext = (2.0 / s) * (A.transpose() * odd) - evenPrev;
            Matrix oddNext = (2.0 / s) * (A * evenNext) - odd;
            evenPrev = std::move(evenNext);
            odd = std::move(oddNext);
        }
        const double scale = phi.sigmaK() / chebyshev_value(phi.degree(), phi.sigmaK() / s);
        return scale * odd;
    }

    // Horner in A A^T applied through chained products.
    const std::vector<double> c = phi.odd_coefficients();
    const Matrix G = A * X;
    Matrix R = c.back() * G;
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it) {
        R = A * (A.transpose() * R) + *it * G;
    }
    return R;
}

}  // namespace krydom
