#ifndef BANDCORR_SCALING_HPP
#define BANDCORR_SCALING_HPP

#include <utility>

#include "bandcorr/types.hpp"

namespace bandcorr::scaling {

/// Spectral constants attached to a bulk energy E of the semicircle law.
struct EnergyParams {
  Real energy = 0.0;
  Real rho = 0.0;        // semicircle density at E
  Complex a_plus;        // unit-modulus saddle points, a_plus * a_minus = -1
  Complex a_minus;
  Real t_star = 0.0;     // (2 pi rho)^2 = 4 - E^2
};

/// Microscopically scaled spectral arguments lambda_{1,2} = E +- xi/(2 N rho).
struct ScaledPair {
  Real lambda1 = 0.0;
  Real lambda2 = 0.0;
  Real xi = 0.0;
  long total_dim = 0;  // N = n * W
};

/// Density (1/2pi) sqrt(4 - E^2) of the semicircle law; defined on [-2, 2],
/// zero at the edges.  Throws std::domain_error for |E| > 2.
Real semicircle_density(Real energy);

/// Cumulative distribution of the semicircle law, clamped to {0, 1} outside
/// [-2, 2].
Real semicircle_cdf(Real x);

/// Saddle points a_{+-} = (iE +- sqrt(4 - E^2)) / 2 for E in the open bulk
/// (-2, 2).
std::pair<Complex, Complex> saddle_points(Real energy);

/// (2 pi rho(E))^2, equal to 4 - E^2; E restricted to (-2, 2).
Real t_star(Real energy);

/// C* = C_* / t_star(E), the coupling entering the critical-regime generator
/// when the block counts satisfy n = C_* W.
Real critical_coupling(Real c_sub_star, Real energy);

/// All constants for one energy in a single call.
EnergyParams energy_params(Real energy);

/// lambda1 = E + xi/(2 N rho), lambda2 = E - xi/(2 N rho); negating xi swaps
/// the two values exactly.
ScaledPair scaled_pair(Real energy, Real xi, long total_dim);

}  // namespace bandcorr::scaling

#endif
