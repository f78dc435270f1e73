#ifndef BANDCORR_HARMONICS_HPP
#define BANDCORR_HARMONICS_HPP

#include <functional>

#include "bandcorr/types.hpp"

namespace bandcorr::harmonics {

/// Gauss rule for the radial probability measure 12 x^3 (1 - x^2) dx on
/// [0, 1].  Nodes are reported in the x variable; weights sum to one.
struct QuadratureRule {
  VectorXr nodes;
  VectorXr weights;

  Index size() const { return nodes.size(); }

  /// Integral of f against the measure.
  template <typename F>
  Real integrate(F&& f) const {
    Real acc = 0.0;
    for (Index i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// An m-point rule exact for polynomials of degree <= 2m-1 in x^2.
QuadratureRule quadrature_rule(int order);

/// Orthonormal polynomials phi_0..phi_{l-1} in x^2 for the radial measure,
/// with phi_0 = 1 and the leading coefficient of phi_j in (1 - 2x^2) positive.
/// Built from the exact three-term recurrence; the attached quadrature rule
/// integrates all products phi_i phi_j (1 - 2x^2) exactly.
class SpectralBasis {
 public:
  SpectralBasis(int size, const QuadratureRule& rule);

  int size() const { return size_; }
  const QuadratureRule& rule() const { return rule_; }

  /// phi_j at the quadrature nodes; row j, column = node index.
  const MatrixXr& node_values() const { return node_values_; }

  /// phi_j(x) for arbitrary x in [0, 1].
  Real evaluate(int j, Real x) const;

  /// phi_j at x = 0 (positive under the sign convention).
  Real value_at_zero(int j) const { return at_zero_[j]; }

  /// Matrix of integrals  int phi_i(x) f(x) phi_j(x) dmu(x)  by quadrature.
  MatrixXr weighted_gram(const std::function<Real(Real)>& f) const;

  /// Gram matrix of the basis under the quadrature (identity up to roundoff).
  MatrixXr gram() const;

 private:
  int size_;
  QuadratureRule rule_;
  VectorXr sqrt_beta_;     // recurrence coefficients, u = x^2 variable
  MatrixXr node_values_;
  VectorXr at_zero_;
};

/// Basis of the given size over quadrature_rule(order); order = 0 selects the
/// default 2*size + 8.  Explicit orders below size + 1 are rejected.
SpectralBasis build_basis(int size, int quadrature_order = 0);

/// Multiplication by nu(x) = 1 - 2x^2 in the phi basis: tridiagonal with zero
/// diagonal, entries obtained by quadrature.
struct TridiagonalNu {
  VectorXr diagonal;       // all ~0
  VectorXr off_diagonal;   // size l-1

  Index order() const { return diagonal.size(); }
  MatrixXr dense() const;
};

TridiagonalNu nu_matrix(const SpectralBasis& basis);
TridiagonalNu nu_matrix(int size, int quadrature_order = 0);

/// Laplace-Beltrami eigenvalues j(j+3), j = 0..size-1.
VectorXr laplace_spectrum(int size);

/// Closed-form Haar integral of exp(-p S):
/// (6/p^2) (1 - 2/p + e^{-p} (1 + 2/p)), continuous limit 1 at p -> 0.
/// Throws std::domain_error at p = 0; callers use the limit there.
Real iz_integral(Real p);

/// Transfer-operator eigenvalue
///   lambda_j(p) = (p^2/6) int e^{-p x^2} phi_j(x)/phi_j(0) dmu(x),
/// evaluated by quadrature of adaptive order (at least quadrature_order when
/// given).  For p > 700 the e^{-p} contribution is below double-precision
/// underflow and the polynomial part of the closed form is used instead.
Real transfer_eigenvalue(int j, Real p, int quadrature_order = 0);

/// DS(x) = 3 (sin x / x^3 - cos x / x^2); even, DS(0) = 1.
Real ds_function(Real x);

}  // namespace bandcorr::harmonics

#endif
