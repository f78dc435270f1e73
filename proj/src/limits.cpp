#include "bandcorr/limits.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "bandcorr/errors.hpp"
#include "bandcorr/harmonics.hpp"
#include "bandcorr/scaling.hpp"

namespace bandcorr::limits {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;
constexpr Real kLogDblMax = 709.0;

}  // namespace

MatrixXc matrix_exponential(const MatrixXc& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix_exponential: matrix must be square");
  }
  if (m.rows() > 512) {
    throw std::invalid_argument("matrix_exponential: order must be <= 512");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("matrix_exponential: entries must be finite");
  }
  // ||e^M||_inf <= exp(mu) with mu the infinity log-norm.
  Real mu = 0.0;
  for (Index i = 0; i < m.rows(); ++i) {
    Real row = m(i, i).real();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j != i) row += std::abs(m(i, j));
    }
    mu = (i == 0) ? row : std::max(mu, row);
  }
  if (mu > kLogDblMax) {
    throw std::overflow_error(
        "matrix_exponential: log-norm bound " + std::to_string(mu) +
        " exceeds the floating range");
  }
  return m.exp();
}

MatrixXc matrix_power(MatrixXc base, unsigned long exponent) {
  MatrixXc result = MatrixXc::Identity(base.rows(), base.cols());
  while (exponent > 0) {
    if (exponent & 1ul) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

TruncatedGenerator make_generator(Real xi, Real c_star, int truncation,
                                  int quadrature_order) {
  if (truncation < 1) {
    throw std::invalid_argument("make_generator: truncation must be >= 1");
  }
  if (c_star < 0.0) {
    throw std::invalid_argument("make_generator: C* must be >= 0");
  }
  TruncatedGenerator gen;
  gen.c_star = c_star;
  gen.xi = xi;
  gen.order = truncation;
  const VectorXr delta = harmonics::laplace_spectrum(truncation);
  const harmonics::TridiagonalNu nu =
      harmonics::nu_matrix(truncation, quadrature_order);
  gen.matrix = (c_star * delta.asDiagonal().toDenseMatrix()).cast<Complex>();
  gen.matrix += Complex(0.0, kPi * xi) * nu.dense().cast<Complex>();
  return gen;
}

Real delocalized_limit(Real xi) { return harmonics::ds_function(kPi * xi); }

Real localized_limit(Real /*xi*/) { return 1.0; }

Real critical_limit(Real xi, Real c_star, int truncation,
                    int quadrature_order) {
  if (truncation < 1) {
    throw std::invalid_argument("critical_limit: truncation must be >= 1");
  }
  if (c_star < 0.0) {
    throw std::invalid_argument("critical_limit: C* must be >= 0");
  }
  if (xi == 0.0) {
    // the generator is C* Delta, which annihilates phi_0
    return 1.0;
  }
  const TruncatedGenerator gen =
      make_generator(xi, c_star, truncation, quadrature_order);
  const MatrixXc exp = matrix_exponential(-gen.matrix);
  const Complex entry = exp(0, 0);
  if (std::abs(entry.imag()) > 1e-10) {
    throw NumericalQualityError(
        "critical_limit: imaginary residue " +
        std::to_string(std::abs(entry.imag())) + " exceeds 1e-10");
  }
  return entry.real();
}

Real finite_n_propagator(Real xi, long n_blocks, long block_size, Real energy,
                         int truncation, int quadrature_order) {
  if (n_blocks < 2) {
    throw std::invalid_argument("finite_n_propagator: need n >= 2 blocks");
  }
  if (block_size < 1) {
    throw std::invalid_argument("finite_n_propagator: need W >= 1");
  }
  if (truncation < 1) {
    throw std::invalid_argument("finite_n_propagator: truncation must be >= 1");
  }
  const Real t_star = scaling::t_star(energy);

  MatrixXc k0 = MatrixXc::Identity(truncation, truncation);
  if (truncation > 1) {
    const VectorXr delta = harmonics::laplace_spectrum(truncation);
    const harmonics::TridiagonalNu nu =
        harmonics::nu_matrix(truncation, quadrature_order);
    k0 -= (delta / (t_star * static_cast<Real>(block_size)))
              .asDiagonal()
              .toDenseMatrix()
              .cast<Complex>();
    k0 -= Complex(0.0, kPi * xi / static_cast<Real>(n_blocks)) *
          nu.dense().cast<Complex>();
  }
  const MatrixXc power =
      matrix_power(std::move(k0), static_cast<unsigned long>(n_blocks - 1));
  const Complex entry = power(0, 0);
  if (std::abs(entry.imag()) > 1e-9) {
    throw NumericalQualityError(
        "finite_n_propagator: imaginary residue " +
        std::to_string(std::abs(entry.imag())) + " exceeds 1e-9");
  }
  return entry.real();
}

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::localized:
      return "localized";
    case Regime::critical:
      return "critical";
    case Regime::delocalized:
      return "delocalized";
    case Regime::finite:
      return "finite";
  }
  return "unknown";
}

Regime parse_regime(std::string_view name) {
  if (name == "localized") return Regime::localized;
  if (name == "critical") return Regime::critical;
  if (name == "delocalized") return Regime::delocalized;
  if (name == "finite") return Regime::finite;
  throw std::invalid_argument("unknown regime tag: " + std::string(name));
}

RegimeCurve regime_curve(Regime regime, const RegimeParams& params,
                         const VectorXr& xi_grid) {
  if (!xi_grid.allFinite()) {
    throw std::invalid_argument("regime_curve: xi grid must be finite");
  }
  RegimeCurve curve;
  curve.regime = regime;
  curve.params = params;
  curve.xi = xi_grid;
  curve.values.resize(xi_grid.size());
  curve.truncation_error = VectorXr::Zero(xi_grid.size());

  const int l = params.truncation;
  // an override sized for l may be too small for the doubled diagnostic
  const int doubled_order =
      params.quadrature_order >= 2 * l + 1 ? params.quadrature_order : 0;
  for (Index i = 0; i < xi_grid.size(); ++i) {
    const Real xi = xi_grid[i];
    switch (regime) {
      case Regime::delocalized:
        curve.values[i] = delocalized_limit(xi);
        break;
      case Regime::localized:
        curve.values[i] = localized_limit(xi);
        break;
      case Regime::critical: {
        const Real v = critical_limit(xi, params.c_star, l,
                                      params.quadrature_order);
        const Real v2 =
            critical_limit(xi, params.c_star, 2 * l, doubled_order);
        curve.values[i] = v;
        curve.truncation_error[i] = std::abs(v - v2);
        break;
      }
      case Regime::finite: {
        const Real v =
            finite_n_propagator(xi, params.n_blocks, params.block_size,
                                params.energy, l, params.quadrature_order);
        const Real v2 =
            finite_n_propagator(xi, params.n_blocks, params.block_size,
                                params.energy, 2 * l, doubled_order);
        curve.values[i] = v;
        curve.truncation_error[i] = std::abs(v - v2);
        break;
      }
    }
  }
  return curve;
}

}  // namespace bandcorr::limits
