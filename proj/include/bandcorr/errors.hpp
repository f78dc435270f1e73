#ifndef BANDCORR_ERRORS_HPP
#define BANDCORR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bandcorr {

/// Raised when a computed quantity fails an internal quality check
/// (imaginary residue too large, truncation not converged, degenerate
/// Monte Carlo batch).  Distinct from argument errors so drivers can map
/// it to a dedicated exit status.
class NumericalQualityError : public std::runtime_error {
 public:
  explicit NumericalQualityError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace bandcorr

#endif
