#include "bandcorr/harmonics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bandcorr/errors.hpp"

namespace bandcorr::harmonics {

namespace {

// Recurrence coefficients of the orthogonal polynomials for the weight
// 6 u (1 - u) du on [0, 1], the pushforward of the radial measure under
// u = x^2.  The diagonal coefficient is 1/2 for every degree.
Real beta_coefficient(int k) {
  const Real kk = static_cast<Real>(k);
  return kk * (kk + 2.0) / (4.0 * (2.0 * kk + 1.0) * (2.0 * kk + 3.0));
}

constexpr Real kStructureTol = 1e-12;

}  // namespace

QuadratureRule quadrature_rule(int order) {
  if (order < 1) {
    throw std::invalid_argument("quadrature_rule: order must be >= 1");
  }
  MatrixXr jacobi = MatrixXr::Zero(order, order);
  for (int k = 0; k < order; ++k) {
    jacobi(k, k) = 0.5;
    if (k + 1 < order) {
      const Real sb = std::sqrt(beta_coefficient(k + 1));
      jacobi(k, k + 1) = sb;
      jacobi(k + 1, k) = sb;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXr> solver(jacobi);
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues().cwiseSqrt();  // u -> x
  rule.weights =
      solver.eigenvectors().row(0).transpose().array().square().matrix();
  return rule;
}

SpectralBasis::SpectralBasis(int size, const QuadratureRule& rule)
    : size_(size), rule_(rule) {
  if (size < 1) {
    throw std::invalid_argument("SpectralBasis: size must be >= 1");
  }
  sqrt_beta_.resize(size + 1);
  for (int k = 0; k <= size; ++k) {
    sqrt_beta_[k] = std::sqrt(beta_coefficient(k));
  }

  const Index m = rule_.size();
  const VectorXr u = rule_.nodes.array().square().matrix();
  node_values_.resize(size_, m);
  at_zero_.resize(size_);

  // phi_j(x) = (-1)^j p_j(x^2), p_j the orthonormal recurrence polynomials;
  // the sign makes the leading coefficient in (1 - 2x^2) positive.
  VectorXr prev = VectorXr::Zero(m);
  VectorXr cur = VectorXr::Ones(m);
  Real prev0 = 0.0;
  Real cur0 = 1.0;
  Real sign = 1.0;
  for (int j = 0; j < size_; ++j) {
    node_values_.row(j) = sign * cur.transpose();
    at_zero_[j] = sign * cur0;
    if (j + 1 < size_) {
      const VectorXr next =
          ((u.array() - 0.5) * cur.array() - sqrt_beta_[j] * prev.array()) /
          sqrt_beta_[j + 1];
      const Real next0 = (-0.5 * cur0 - sqrt_beta_[j] * prev0) /
                         sqrt_beta_[j + 1];
      prev = cur;
      cur = next;
      prev0 = cur0;
      cur0 = next0;
      sign = -sign;
    }
  }
}

Real SpectralBasis::evaluate(int j, Real x) const {
  if (j < 0 || j >= size_) {
    throw std::invalid_argument("SpectralBasis::evaluate: index out of range");
  }
  const Real u = x * x;
  Real prev = 0.0;
  Real cur = 1.0;
  for (int k = 0; k < j; ++k) {
    const Real next =
        ((u - 0.5) * cur - sqrt_beta_[k] * prev) / sqrt_beta_[k + 1];
    prev = cur;
    cur = next;
  }
  return (j % 2 == 0) ? cur : -cur;
}

MatrixXr SpectralBasis::weighted_gram(
    const std::function<Real(Real)>& f) const {
  VectorXr wf(rule_.size());
  for (Index i = 0; i < rule_.size(); ++i) {
    wf[i] = rule_.weights[i] * f(rule_.nodes[i]);
  }
  return node_values_ * wf.asDiagonal() * node_values_.transpose();
}

MatrixXr SpectralBasis::gram() const {
  return weighted_gram([](Real) { return 1.0; });
}

SpectralBasis build_basis(int size, int quadrature_order) {
  if (size < 1) {
    throw std::invalid_argument("build_basis: size must be >= 1");
  }
  int order = quadrature_order;
  if (order == 0) {
    order = 2 * size + 8;
  } else if (order < size + 1) {
    throw std::invalid_argument(
        "build_basis: quadrature order must be at least size + 1");
  }
  return SpectralBasis(size, quadrature_rule(order));
}

MatrixXr TridiagonalNu::dense() const {
  const Index l = diagonal.size();
  MatrixXr out = MatrixXr::Zero(l, l);
  out.diagonal() = diagonal;
  for (Index j = 0; j + 1 < l; ++j) {
    out(j, j + 1) = off_diagonal[j];
    out(j + 1, j) = off_diagonal[j];
  }
  return out;
}

TridiagonalNu nu_matrix(const SpectralBasis& basis) {
  const MatrixXr dense =
      basis.weighted_gram([](Real x) { return 1.0 - 2.0 * x * x; });
  const Index l = dense.rows();
  for (Index i = 0; i < l; ++i) {
    for (Index j = i + 2; j < l; ++j) {
      if (std::abs(dense(i, j)) > kStructureTol) {
        throw NumericalQualityError(
            "nu_matrix: entry beyond the first off-diagonal is not zero");
      }
    }
  }
  TridiagonalNu nu;
  nu.diagonal = dense.diagonal();
  if (nu.diagonal.cwiseAbs().maxCoeff() > kStructureTol) {
    throw NumericalQualityError("nu_matrix: diagonal is not zero");
  }
  nu.off_diagonal.resize(l - 1);
  for (Index j = 0; j + 1 < l; ++j) {
    nu.off_diagonal[j] = 0.5 * (dense(j, j + 1) + dense(j + 1, j));
  }
  return nu;
}

TridiagonalNu nu_matrix(int size, int quadrature_order) {
  return nu_matrix(build_basis(size, quadrature_order));
}

VectorXr laplace_spectrum(int size) {
  if (size < 1) {
    throw std::invalid_argument("laplace_spectrum: size must be >= 1");
  }
  VectorXr out(size);
  for (int j = 0; j < size; ++j) {
    out[j] = static_cast<Real>(j) * (j + 3.0);
  }
  return out;
}

Real iz_integral(Real p) {
  if (p == 0.0) {
    throw std::domain_error("iz_integral: p = 0 (use the limit value 1)");
  }
  if (std::abs(p) < 0.5) {
    // 6 sum_{m>=0} (-1)^m (m+1) p^m / (m+3)!; the closed form cancels
    // catastrophically for small p.
    Real acc = 0.0;
    Real pow_neg = 1.0;  // (-p)^m
    Real fact = 6.0;     // (m+3)!
    for (int m = 0; m <= 30; ++m) {
      const Real term = 6.0 * (m + 1.0) * pow_neg / fact;
      acc += term;
      if (std::abs(term) < 1e-18) break;
      pow_neg *= -p;
      fact *= m + 4.0;
    }
    return acc;
  }
  return 6.0 / (p * p) *
         (1.0 - 2.0 / p + std::exp(-p) * (1.0 + 2.0 / p));
}

namespace {

// Monomial coefficients (in u) of p_j / p_j(0), the degree-j orthonormal
// polynomial normalized to one at u = 0.
std::vector<Real> normalized_monomial_coefficients(int j) {
  std::vector<Real> prev;
  std::vector<Real> cur{1.0};
  for (int k = 0; k < j; ++k) {
    const Real sb_k = std::sqrt(beta_coefficient(k));
    const Real sb_next = std::sqrt(beta_coefficient(k + 1));
    std::vector<Real> next(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      next[i + 1] += cur[i];
      next[i] -= 0.5 * cur[i];
    }
    for (std::size_t i = 0; i < prev.size(); ++i) {
      next[i] -= sb_k * prev[i];
    }
    for (Real& c : next) c /= sb_next;
    prev = std::move(cur);
    cur = std::move(next);
  }
  const Real at_zero = cur[0];
  for (Real& c : cur) c /= at_zero;
  return cur;
}

// Polynomial part of the closed form: with the e^{-p} contribution dropped,
// int_0^1 u^k e^{-pu} du = k!/p^{k+1} exactly in double for p > 700.
Real transfer_eigenvalue_large_p(int j, Real p) {
  const std::vector<Real> coef = normalized_monomial_coefficients(j);
  Real acc = 0.0;
  Real fact_over_pow = 1.0;  // (k+1)!/p^k
  for (int k = 0; k <= j; ++k) {
    acc += coef[k] * fact_over_pow * (1.0 - (k + 2.0) / p);
    fact_over_pow *= (k + 2.0) / p;
  }
  return acc;
}

}  // namespace

Real transfer_eigenvalue(int j, Real p, int quadrature_order) {
  if (j < 0) {
    throw std::invalid_argument("transfer_eigenvalue: j must be >= 0");
  }
  if (!(p > 0.0)) {
    throw std::domain_error("transfer_eigenvalue: p must be positive");
  }
  if (p > 700.0) {
    // the closed-form terms decay geometrically iff j(j+3) <= p/2; beyond
    // that the alternating sum cancels and quadrature takes over
    if (static_cast<Real>(j) * (j + 3.0) <= 0.5 * p) {
      return transfer_eigenvalue_large_p(j, p);
    }
    if (p > 4000.0) {
      throw std::invalid_argument(
          "transfer_eigenvalue: j too large for reliable evaluation at this p");
    }
  }
  // The integrand e^{-pu} behaves like a polynomial of degree ~p; the order
  // grows with p so the rule resolves it to full precision.
  int order = std::max(j + 2,
                       std::max(32, static_cast<int>(std::ceil(0.55 * p)) + 24));
  if (quadrature_order > 0) {
    order = std::max(quadrature_order, j + 2);
  }
  const QuadratureRule rule = quadrature_rule(order);

  const Index m = rule.size();
  VectorXr prev = VectorXr::Zero(m);
  VectorXr cur = VectorXr::Ones(m);
  Real prev0 = 0.0;
  Real cur0 = 1.0;
  const VectorXr u = rule.nodes.array().square().matrix();
  for (int k = 0; k < j; ++k) {
    const Real sb_k = std::sqrt(beta_coefficient(k));
    const Real sb_next = std::sqrt(beta_coefficient(k + 1));
    const VectorXr next =
        ((u.array() - 0.5) * cur.array() - sb_k * prev.array()) / sb_next;
    const Real next0 = (-0.5 * cur0 - sb_k * prev0) / sb_next;
    prev = cur;
    cur = next;
    prev0 = cur0;
    cur0 = next0;
  }

  Real acc = 0.0;
  for (Index i = 0; i < m; ++i) {
    acc += rule.weights[i] * std::exp(-p * u[i]) * (cur[i] / cur0);
  }
  return p * p / 6.0 * acc;
}

Real ds_function(Real x) {
  if (std::abs(x) < 0.5) {
    // 3 sum_{m>=0} (-1)^m 2(m+1) x^{2m} / (2m+3)!
    Real acc = 0.0;
    Real pow_neg = 1.0;  // (-x^2)^m
    Real fact = 6.0;     // (2m+3)!
    for (int m = 0; m <= 12; ++m) {
      const Real term = 6.0 * (m + 1.0) * pow_neg / fact;
      acc += term;
      if (std::abs(term) < 1e-18) break;
      pow_neg *= -x * x;
      fact *= (2.0 * m + 4.0) * (2.0 * m + 5.0);
    }
    return acc;
  }
  return 3.0 * (std::sin(x) / (x * x * x) - std::cos(x) / (x * x));
}

}  // namespace bandcorr::harmonics
