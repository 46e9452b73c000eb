#ifndef KRYDOM_AMPLIFIER_HPP
#define KRYDOM_AMPLIFIER_HPP

#include <vector>

#include "krydom/matrix_core.hpp"

namespace krydom {

/**
 * Polynomial with odd powers only, either as explicit odd-power coefficients
 * or as the scaled Chebyshev form
 *
 *     phi(x) = sigmaK * T_d(x / sigmaK1) / T_d(sigmaK / sigmaK1),  d = 2q+1.
 *
 * Chebyshev evaluation goes through the cos/cosh closed forms for scalars
 * and the three-term recurrence for matrix filtering; expanded coefficients
 * are available only for q <= 4 where they are still well conditioned.
 */
class OddPolynomial {
  public:
    /// phi(x) = x.
    static OddPolynomial identity();
    /// coeffs[i] multiplies x^(2i+1).
    static OddPolynomial from_odd_coefficients(std::vector<double> coeffs);
    static OddPolynomial chebyshev_amplifier(double sigmaK, double sigmaK1, int q);

    double operator()(double x) const;
    /// Elementwise evaluation on a vector of singular values.
    Vector apply(const Vector& sigma) const;

    int degree() const { return degree_; }
    bool isChebyshev() const { return chebyshev_; }
    int q() const;
    double sigmaK() const;
    double sigmaK1() const;
    /// Expanded odd-power coefficients; InvalidArgument for Chebyshev q > 4.
    std::vector<double> odd_coefficients() const;

  private:
    OddPolynomial() = default;

    bool chebyshev_ = false;
    int degree_ = 1;
    std::vector<double> coeffs_;  // odd powers only; index i <-> x^(2i+1)
    double sigmaK_ = 0.0;
    double sigmaK1_ = 0.0;
    int q_ = 0;
};

/**
 * Gap-amplifying filter for a spectrum with sigmaK > sigmaK1 > 0. The result
 * fixes phi(sigmaK) = sigmaK, grows super-linearly above sigmaK and crushes
 * [0, sigmaK1] to at most 4*sigmaK1 / 2^((2q+1) min(sqrt(gammaK), 1)).
 */
OddPolynomial build_amplifier(double sigmaK, double sigmaK1, int q);

/**
 * Generalized matrix function: with phi(x) = x psi(x^2), returns
 * psi(A A^T) A X without forming A A^T or any SVD. Equals
 * U phi(Sigma) V^T X for any SVD of A.
 */
Matrix apply_odd_polynomial(const Matrix& A, const OddPolynomial& phi, const Matrix& X);

}  // namespace krydom

#endif
