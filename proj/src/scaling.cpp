#include "bandcorr/scaling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bandcorr::scaling {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

void require_bulk(Real energy, const char* who) {
  if (!(energy > -2.0 && energy < 2.0)) {
    throw std::domain_error(std::string(who) +
                            ": energy must lie in the open bulk (-2, 2)");
  }
}

}  // namespace

Real semicircle_density(Real energy) {
  if (!(energy >= -2.0 && energy <= 2.0)) {
    throw std::domain_error("semicircle_density: energy outside [-2, 2]");
  }
  return std::sqrt(4.0 - energy * energy) / (2.0 * kPi);
}

Real semicircle_cdf(Real x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * kPi) +
         std::asin(0.5 * x) / kPi;
}

std::pair<Complex, Complex> saddle_points(Real energy) {
  require_bulk(energy, "saddle_points");
  const Real root = std::sqrt(4.0 - energy * energy);
  return {Complex(0.5 * root, 0.5 * energy),
          Complex(-0.5 * root, 0.5 * energy)};
}

Real t_star(Real energy) {
  require_bulk(energy, "t_star");
  const Real rho = semicircle_density(energy);
  return (2.0 * kPi * rho) * (2.0 * kPi * rho);
}

Real critical_coupling(Real c_sub_star, Real energy) {
  return c_sub_star / t_star(energy);
}

EnergyParams energy_params(Real energy) {
  require_bulk(energy, "energy_params");
  EnergyParams out;
  out.energy = energy;
  out.rho = semicircle_density(energy);
  std::tie(out.a_plus, out.a_minus) = saddle_points(energy);
  out.t_star = t_star(energy);
  return out;
}

ScaledPair scaled_pair(Real energy, Real xi, long total_dim) {
  require_bulk(energy, "scaled_pair");
  if (total_dim < 1) {
    throw std::domain_error("scaled_pair: total dimension must be positive");
  }
  const Real rho = semicircle_density(energy);
  const Real shift = xi / (2.0 * static_cast<Real>(total_dim) * rho);
  // lambda2 uses the same rounded shift so that negating xi swaps the pair
  // bit for bit.
  return ScaledPair{energy + shift, energy - shift, xi, total_dim};
}

}  // namespace bandcorr::scaling
