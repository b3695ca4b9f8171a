#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace qpn {

using cplx = std::complex<double>;

/// Exponent A xi^2 + B conj(xi)^2 + C |xi|^2 + D xi + E conj(xi).
struct GaussianExponent {
  cplx A{}, B{}, C{}, D{}, E{};
  bool operator==(const GaussianExponent&) const = default;
};

/// Closed-form normally ordered characteristic function
///
///   Phi(xi) = sum_k  P_k(xi, conj(xi)) exp(G_k(xi)),
///
/// with P_k polynomials and G_k Gaussian exponents. The family is closed
/// under the Wirtinger derivatives d/dxi and d/dconj(xi) (treating xi and
/// conj(xi) as independent), multiplication by monomials, rescaling of xi
/// and multiplication by exp(c |xi|^2), which is everything the ladder
/// identities for photon addition/subtraction and the thermal channel need.
class CharFnExpr {
 public:
  using Monomial = std::pair<int, int>;  // powers of xi and conj(xi)
  using Polynomial = std::map<Monomial, cplx>;

  struct Term {
    GaussianExponent exponent;
    Polynomial poly;
  };

  static CharFnExpr constant(cplx c);
  static CharFnExpr gaussian(const GaussianExponent& g, cplx coeff = 1.0);

  CharFnExpr operator+(const CharFnExpr& o) const;
  CharFnExpr operator*(cplx s) const;
  /// Multiplies by coeff * xi^p * conj(xi)^q.
  CharFnExpr times_monomial(int p, int q, cplx coeff = 1.0) const;
  CharFnExpr d_xi() const;
  CharFnExpr d_xibar() const;
  /// xi -> s * xi
  CharFnExpr rescaled(double s) const;
  /// Multiplies by exp(c |xi|^2).
  CharFnExpr times_gaussian(double c) const;

  cplx operator()(cplx xi) const;
  cplx at_zero() const;

  const std::vector<Term>& terms() const { return terms_; }

 private:
  void add_term(const GaussianExponent& g, const Polynomial& p);
  std::vector<Term> terms_;
};

}  // namespace qpn
