#ifndef BANDCORR_MC_HPP
#define BANDCORR_MC_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "bandcorr/rng.hpp"
#include "bandcorr/types.hpp"

namespace bandcorr::mc {

/// Ensemble of n x n blocks of W x W Gaussian entries, N = n W total.
struct EnsembleParams {
  long n_blocks = 1;
  long block_size = 1;
  Real beta = 0.2;
  Real energy = 0.0;

  long total_dim() const { return n_blocks * block_size; }
};

/// Throws std::invalid_argument unless beta is in (0, 1/4), the sizes are
/// positive and the energy lies in the bulk.
void validate(const EnsembleParams& params);

/// J = (1/W)(I + beta Laplacian) with Neumann boundary: tridiagonal,
/// nonnegative, every column sums to 1/W.
MatrixXr variance_profile(long n_blocks, long block_size, Real beta);

/// One draw of the symmetric N x N matrix: independent upper-triangle
/// Gaussians of variance J_{jk} (2 J_{jj} on the diagonal); entries in blocks
/// with J_{jk} = 0 are exactly zero.
MatrixXr sample_matrix(const EnsembleParams& params, const MatrixXr& profile,
                       rng::GaussianStream& stream);

/// sign * exp(log_abs); log-scale product representation that cannot
/// overflow for the matrix sizes in use.
struct LogSignValue {
  Real log_abs = 0.0;
  int sign = 1;  // -1, 0, +1

  Real value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// det(lambda1 - H) det(lambda2 - H) from the spectrum of H; the sign is an
/// exact zero when some eigenvalue equals lambda1 or lambda2.
LogSignValue char_poly_from_spectrum(const VectorXr& eigenvalues, Real lambda1,
                                     Real lambda2);

/// Same product computed from the matrix (one symmetric eigendecomposition).
LogSignValue char_poly_product(const MatrixXr& h, Real lambda1, Real lambda2);

struct McEstimate {
  Real xi = 0.0;
  Real ratio = 0.0;
  Real std_error = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  EnsembleParams params;
};

/// Per-sample determinant products over the evaluation grid (0 is appended
/// when the requested grid does not contain it).
struct WeightTable {
  std::vector<Real> xi;
  Index zero_index = 0;
  MatrixXr log_abs;  // samples x grid
  MatrixXr sign;     // samples x grid, entries -1/0/+1
};

struct McDiagnostics {
  bool degenerate_batch = false;
  Real common_log_offset = 0.0;
};

inline constexpr int kBatchCount = 50;

/// Samples the ensemble and fills the weight table; deterministic in
/// (params, xi_grid, samples, seed) for any worker count.
WeightTable weight_table(const EnsembleParams& params,
                         const std::vector<Real>& xi_grid, long samples,
                         std::uint64_t seed, int workers = 0);

/// Ratio estimates with delta-method errors over kBatchCount batches; the
/// weights are rescaled by the common offset max(log_abs) before summation.
std::vector<McEstimate> reduce_weight_table(const WeightTable& table,
                                            const EnsembleParams& params,
                                            std::uint64_t seed,
                                            McDiagnostics* diagnostics = nullptr);

/// weight_table followed by reduce_weight_table.
std::vector<McEstimate> estimate_ratio(const EnsembleParams& params,
                                       const std::vector<Real>& xi_grid,
                                       long samples, std::uint64_t seed,
                                       int workers = 0,
                                       McDiagnostics* diagnostics = nullptr);

}  // namespace bandcorr::mc

#endif
