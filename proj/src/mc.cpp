#include "bandcorr/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>

#include "bandcorr/errors.hpp"
#include "bandcorr/scaling.hpp"

namespace bandcorr::mc {

void validate(const EnsembleParams& params) {
  if (params.n_blocks < 1) {
    throw std::invalid_argument("ensemble: n must be >= 1");
  }
  if (params.block_size < 1) {
    throw std::invalid_argument("ensemble: W must be >= 1");
  }
  if (!(params.beta > 0.0 && params.beta < 0.25)) {
    throw std::invalid_argument("ensemble: beta must lie in (0, 1/4)");
  }
  if (!(params.energy > -2.0 && params.energy < 2.0)) {
    throw std::invalid_argument("ensemble: energy must lie in (-2, 2)");
  }
}

MatrixXr variance_profile(long n_blocks, long block_size, Real beta) {
  if (n_blocks < 1) {
    throw std::invalid_argument("variance_profile: n must be >= 1");
  }
  if (block_size < 1) {
    throw std::invalid_argument("variance_profile: W must be >= 1");
  }
  if (!(beta > 0.0 && beta < 0.25)) {
    throw std::invalid_argument("variance_profile: beta must lie in (0, 1/4)");
  }
  const Real inv_w = 1.0 / static_cast<Real>(block_size);
  MatrixXr profile = MatrixXr::Zero(n_blocks, n_blocks);
  for (long j = 0; j < n_blocks; ++j) {
    // Neumann Laplacian: diagonal -2 in the interior, -1 at the two ends.
    const int degree = (j == 0 ? 0 : 1) + (j == n_blocks - 1 ? 0 : 1);
    profile(j, j) = (1.0 - beta * degree) * inv_w;
    if (j + 1 < n_blocks) {
      profile(j, j + 1) = beta * inv_w;
      profile(j + 1, j) = beta * inv_w;
    }
  }
  return profile;
}

MatrixXr sample_matrix(const EnsembleParams& params, const MatrixXr& profile,
                       rng::GaussianStream& stream) {
  const long n = params.n_blocks;
  const long w = params.block_size;
  if (profile.rows() != n || profile.cols() != n) {
    throw std::invalid_argument("sample_matrix: profile does not match params");
  }
  const long dim = n * w;
  MatrixXr h = MatrixXr::Zero(dim, dim);
  for (long r = 0; r < dim; ++r) {
    const long jr = r / w;
    for (long c = r; c < dim; ++c) {
      const long jc = c / w;
      const Real variance = profile(jr, jc);
      if (variance == 0.0) continue;
      const Real sigma = std::sqrt((r == c ? 2.0 : 1.0) * variance);
      const Real g = sigma * stream.normal();
      h(r, c) = g;
      h(c, r) = g;
    }
  }
  return h;
}

LogSignValue char_poly_from_spectrum(const VectorXr& eigenvalues, Real lambda1,
                                     Real lambda2) {
  LogSignValue out{0.0, 1};
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const Real d1 = lambda1 - eigenvalues[i];
    const Real d2 = lambda2 - eigenvalues[i];
    if (d1 == 0.0 || d2 == 0.0) {
      return LogSignValue{0.0, 0};
    }
    out.log_abs += std::log(std::abs(d1)) + std::log(std::abs(d2));
    if ((d1 < 0.0) != (d2 < 0.0)) out.sign = -out.sign;
  }
  return out;
}

LogSignValue char_poly_product(const MatrixXr& h, Real lambda1, Real lambda2) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("char_poly_product: matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXr> solver(h, Eigen::EigenvaluesOnly);
  return char_poly_from_spectrum(solver.eigenvalues(), lambda1, lambda2);
}

WeightTable weight_table(const EnsembleParams& params,
                         const std::vector<Real>& xi_grid, long samples,
                         std::uint64_t seed, int workers) {
  validate(params);
  if (samples < 2) {
    throw std::invalid_argument("weight_table: need at least 2 samples");
  }

  WeightTable table;
  table.xi = xi_grid;
  auto zero_it = std::find(table.xi.begin(), table.xi.end(), 0.0);
  if (zero_it == table.xi.end()) {
    table.xi.push_back(0.0);
    table.zero_index = static_cast<Index>(table.xi.size()) - 1;
  } else {
    table.zero_index = zero_it - table.xi.begin();
  }

  const Index grid_size = static_cast<Index>(table.xi.size());
  table.log_abs.resize(samples, grid_size);
  table.sign.resize(samples, grid_size);

  const MatrixXr profile =
      variance_profile(params.n_blocks, params.block_size, params.beta);
  const long dim = params.total_dim();

  std::vector<scaling::ScaledPair> pairs;
  pairs.reserve(grid_size);
  for (Real xi : table.xi) {
    pairs.push_back(scaling::scaled_pair(params.energy, xi, dim));
  }

  int thread_count = workers > 0
                         ? workers
                         : static_cast<int>(std::thread::hardware_concurrency());
  if (thread_count < 1) thread_count = 1;
  thread_count = static_cast<int>(
      std::min<long>(thread_count, samples));

  std::atomic<long> next{0};
  auto body = [&]() {
    Eigen::SelfAdjointEigenSolver<MatrixXr> solver;
    while (true) {
      const long m = next.fetch_add(1);
      if (m >= samples) break;
      rng::GaussianStream stream(seed, static_cast<std::uint64_t>(m));
      const MatrixXr h = sample_matrix(params, profile, stream);
      solver.compute(h, Eigen::EigenvaluesOnly);
      const VectorXr& spectrum = solver.eigenvalues();
      for (Index g = 0; g < grid_size; ++g) {
        const LogSignValue v = char_poly_from_spectrum(
            spectrum, pairs[g].lambda1, pairs[g].lambda2);
        table.log_abs(m, g) = v.log_abs;
        table.sign(m, g) = static_cast<Real>(v.sign);
      }
    }
  };

  if (thread_count == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  return table;
}

std::vector<McEstimate> reduce_weight_table(const WeightTable& table,
                                            const EnsembleParams& params,
                                            std::uint64_t seed,
                                            McDiagnostics* diagnostics) {
  const long samples = table.log_abs.rows();
  const Index grid_size = table.log_abs.cols();
  if (samples < 2 || grid_size < 1 || table.sign.rows() != samples ||
      table.sign.cols() != grid_size) {
    throw std::invalid_argument("reduce_weight_table: malformed table");
  }

  // Common log offset over the whole run; it cancels in every ratio and
  // keeps the rescaled weights inside the floating range.
  Real offset = 0.0;
  bool any = false;
  for (long m = 0; m < samples; ++m) {
    for (Index g = 0; g < grid_size; ++g) {
      if (table.sign(m, g) != 0.0) {
        offset = any ? std::max(offset, table.log_abs(m, g))
                     : table.log_abs(m, g);
        any = true;
      }
    }
  }

  const int batches = static_cast<int>(std::min<long>(kBatchCount, samples));
  MatrixXr batch_sums = MatrixXr::Zero(batches, grid_size);
  for (long m = 0; m < samples; ++m) {
    const int b = static_cast<int>((m * batches) / samples);
    for (Index g = 0; g < grid_size; ++g) {
      if (table.sign(m, g) == 0.0) continue;
      batch_sums(b, g) +=
          table.sign(m, g) * std::exp(table.log_abs(m, g) - offset);
    }
  }

  const VectorXr totals = batch_sums.colwise().sum();
  const Real denominator = totals[table.zero_index];

  bool degenerate = denominator <= 0.0;
  for (int b = 0; b < batches && !degenerate; ++b) {
    degenerate = batch_sums(b, table.zero_index) <= 0.0;
  }
  if (diagnostics != nullptr) {
    diagnostics->degenerate_batch = degenerate;
    diagnostics->common_log_offset = offset;
  }
  if (denominator == 0.0) {
    throw NumericalQualityError(
        "reduce_weight_table: denominator sum is exactly zero");
  }

  std::vector<McEstimate> estimates;
  estimates.reserve(grid_size);
  for (Index g = 0; g < grid_size; ++g) {
    McEstimate est;
    est.xi = table.xi[g];
    est.samples = samples;
    est.seed = seed;
    est.params = params;
    if (g == table.zero_index) {
      est.ratio = 1.0;
      est.std_error = 0.0;
    } else {
      est.ratio = totals[g] / denominator;
      Real residual_sq = 0.0;
      for (int b = 0; b < batches; ++b) {
        const Real r =
            batch_sums(b, g) - est.ratio * batch_sums(b, table.zero_index);
        residual_sq += r * r;
      }
      est.std_error = std::sqrt(residual_sq * batches / (batches - 1.0)) /
                      std::abs(denominator);
    }
    estimates.push_back(est);
  }
  return estimates;
}

std::vector<McEstimate> estimate_ratio(const EnsembleParams& params,
                                       const std::vector<Real>& xi_grid,
                                       long samples, std::uint64_t seed,
                                       int workers,
                                       McDiagnostics* diagnostics) {
  const WeightTable table =
      weight_table(params, xi_grid, samples, seed, workers);
  return reduce_weight_table(table, params, seed, diagnostics);
}

}  // namespace bandcorr::mc
