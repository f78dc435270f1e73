#ifndef BANDCORR_LIMITS_HPP
#define BANDCORR_LIMITS_HPP

#include <string_view>

#include "bandcorr/types.hpp"

namespace bandcorr::limits {

/// Matrix exponential of a square complex matrix of order <= 512.  Throws
/// std::overflow_error when the infinity-log-norm bound exp(max_i(Re m_ii +
/// sum_{j!=i} |m_ij|)) already exceeds the floating range.
MatrixXc matrix_exponential(const MatrixXc& m);

/// base^exponent by repeated squaring.
MatrixXc matrix_power(MatrixXc base, unsigned long exponent);

/// C* Delta_l + i pi xi nu_l acting on the span of phi_0..phi_{l-1}.
struct TruncatedGenerator {
  Real c_star = 0.0;
  Real xi = 0.0;
  int order = 0;
  MatrixXc matrix;
};

TruncatedGenerator make_generator(Real xi, Real c_star, int truncation,
                                  int quadrature_order = 0);

/// DS(pi xi), the W >> n limit.
Real delocalized_limit(Real xi);

/// Identically 1, the W <= n / log^2 n limit.
Real localized_limit(Real xi);

/// (exp(-C* Delta_l - i pi xi nu_l) e0, e0); the imaginary residue is checked
/// against 1e-10 and discarded.
Real critical_limit(Real xi, Real c_star, int truncation,
                    int quadrature_order = 0);

/// Real part of (K0^{n-1} e0, e0) with
///   K0 = I - Delta_l / (t_star(E) W) - (i pi xi / n) nu_l,
/// imaginary residue checked against 1e-9.
Real finite_n_propagator(Real xi, long n_blocks, long block_size, Real energy,
                         int truncation, int quadrature_order = 0);

enum class Regime { localized, critical, delocalized, finite };

const char* regime_name(Regime regime);
Regime parse_regime(std::string_view name);

struct RegimeParams {
  Real c_star = 1.0;      // critical regime
  long n_blocks = 0;      // finite regime
  long block_size = 0;    // finite regime
  Real energy = 0.0;      // finite regime
  int truncation = 30;
  int quadrature_order = 0;
};

struct RegimeCurve {
  Regime regime = Regime::delocalized;
  RegimeParams params;
  VectorXr xi;
  VectorXr values;
  VectorXr truncation_error;  // |value_l - value_2l| for operator regimes

  Real max_truncation_error() const {
    return truncation_error.size() ? truncation_error.maxCoeff() : 0.0;
  }
};

/// Values over a xi grid with a truncation estimate per point (difference
/// between orders l and 2l for the operator-based regimes, zero for the
/// closed forms).
RegimeCurve regime_curve(Regime regime, const RegimeParams& params,
                         const VectorXr& xi_grid);

/// Doubling differences above this are reported as truncation warnings.
inline constexpr Real kTruncationWarnThreshold = 1e-9;

}  // namespace bandcorr::limits

#endif
