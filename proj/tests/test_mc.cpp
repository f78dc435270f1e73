#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "bandcorr/errors.hpp"
#include "bandcorr/mc.hpp"
#include "bandcorr/scaling.hpp"

using namespace bandcorr;
using namespace bandcorr::mc;

TEST_CASE("variance profile entries and column sums") {
  const MatrixXr single = variance_profile(1, 16, 0.2);
  CHECK(single.rows() == 1);
  CHECK(single(0, 0) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));

  const MatrixXr j = variance_profile(3, 10, 0.2);
  CHECK(j(0, 0) == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(j(0, 1) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(j(0, 2) == 0.0);
  CHECK(j(1, 0) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(j(1, 1) == doctest::Approx(0.06).epsilon(1e-15));
  CHECK(j(1, 2) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(j(2, 2) == doctest::Approx(0.08).epsilon(1e-15));

  std::mt19937_64 gen(17);
  std::uniform_int_distribution<long> n_dist(1, 40);
  std::uniform_int_distribution<long> w_dist(1, 200);
  std::uniform_real_distribution<Real> beta_dist(1e-3, 0.2499);
  for (int trial = 0; trial < 25; ++trial) {
    const long n = n_dist(gen);
    const long w = w_dist(gen);
    const MatrixXr profile = variance_profile(n, w, beta_dist(gen));
    CHECK(profile.minCoeff() >= 0.0);
    CHECK((profile - profile.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const VectorXr sums = profile.colwise().sum();
    for (long c = 0; c < n; ++c) {
      CHECK(std::abs(sums[c] - 1.0 / static_cast<Real>(w)) <= 1e-15);
    }
  }
}

TEST_CASE("variance profile rejects couplings outside (0, 1/4)") {
  CHECK_THROWS_AS((void)variance_profile(4, 8, 0.25), std::invalid_argument);
  CHECK_THROWS_AS((void)variance_profile(4, 8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)variance_profile(4, 8, -0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)variance_profile(0, 8, 0.2), std::invalid_argument);
}

TEST_CASE("samples are symmetric with exact zeros outside the band") {
  const EnsembleParams params{4, 8, 0.2, 0.0};
  const MatrixXr profile = variance_profile(4, 8, 0.2);
  rng::GaussianStream stream(123, 0);
  const MatrixXr h = sample_matrix(params, profile, stream);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // blocks with |j - k| >= 2 vanish identically
  CHECK(h.block(0, 16, 8, 16).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.block(24, 0, 8, 16).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.block(0, 0, 8, 8).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("entry moments match the profile") {
  const EnsembleParams params{3, 4, 0.2, 0.0};
  const MatrixXr profile = variance_profile(3, 4, 0.2);
  const long samples = 100000;

  // fixed entries: off-diagonal block (0,1) entry (0,4); diagonal entry (0,0)
  Real sum_off = 0.0, sq_off = 0.0, sum_diag = 0.0, sq_diag = 0.0;
  for (long m = 0; m < samples; ++m) {
    rng::GaussianStream stream(99, static_cast<std::uint64_t>(m));
    const MatrixXr h = sample_matrix(params, profile, stream);
    sum_off += h(0, 4);
    sq_off += h(0, 4) * h(0, 4);
    sum_diag += h(0, 0);
    sq_diag += h(0, 0) * h(0, 0);
  }
  const Real m_count = static_cast<Real>(samples);
  const Real var_off_expected = profile(0, 1);
  const Real var_diag_expected = 2.0 * profile(0, 0);

  const Real mean_off = sum_off / m_count;
  const Real mean_se_off = std::sqrt(var_off_expected / m_count);
  CHECK(std::abs(mean_off) <= 4.0 * mean_se_off);

  const Real var_off = sq_off / m_count - mean_off * mean_off;
  const Real var_se_off = var_off_expected * std::sqrt(2.0 / m_count);
  CHECK(std::abs(var_off - var_off_expected) <= 4.0 * var_se_off);

  const Real mean_diag = sum_diag / m_count;
  const Real mean_se_diag = std::sqrt(var_diag_expected / m_count);
  CHECK(std::abs(mean_diag) <= 4.0 * mean_se_diag);

  const Real var_diag = sq_diag / m_count - mean_diag * mean_diag;
  const Real var_se_diag = var_diag_expected * std::sqrt(2.0 / m_count);
  CHECK(std::abs(var_diag - var_diag_expected) <= 4.0 * var_se_diag);
}

TEST_CASE("char poly product on hand-checked inputs") {
  const MatrixXr zero = MatrixXr::Zero(2, 2);
  const LogSignValue unit = char_poly_product(zero, 1.0, 1.0);
  CHECK(unit.log_abs == 0.0);
  CHECK(unit.sign == 1);
  CHECK(unit.value() == 1.0);

  MatrixXr diag = MatrixXr::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = -1.0;
  const LogSignValue prod = char_poly_product(diag, 2.0, 0.0);
  CHECK(prod.sign == -1);
  CHECK(prod.value() == doctest::Approx(-3.0).epsilon(1e-14));

  // eigenvalue collision pins the sign to zero
  VectorXr spectrum(2);
  spectrum << 1.0, 2.0;
  CHECK(char_poly_from_spectrum(spectrum, 1.0, 0.5).sign == 0);
  CHECK(char_poly_from_spectrum(spectrum, 1.0, 0.5).value() == 0.0);
}

TEST_CASE("char poly product matches an LU determinant oracle") {
  std::mt19937_64 gen(31);
  std::normal_distribution<Real> dist(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXr h(6, 6);
    for (Index i = 0; i < 6; ++i) {
      for (Index j = i; j < 6; ++j) {
        h(i, j) = dist(gen);
        h(j, i) = h(i, j);
      }
    }
    const Real l1 = dist(gen);
    const Real l2 = dist(gen);
    const MatrixXr id = MatrixXr::Identity(6, 6);
    const Real oracle = (l1 * id - h).partialPivLu().determinant() *
                        (l2 * id - h).partialPivLu().determinant();
    const LogSignValue ours = char_poly_product(h, l1, l2);
    CHECK(ours.value() == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(validate(EnsembleParams{2, 8, 0.25, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(EnsembleParams{2, 8, 0.2, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(EnsembleParams{0, 8, 0.2, 0.0}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate(EnsembleParams{2, 8, 0.2, 0.0}));
}

TEST_CASE("ratio estimates normalize exactly at xi = 0") {
  const EnsembleParams params{2, 8, 0.2, 0.0};
  const std::vector<Real> grid{0.0, 0.5, 1.0};
  const auto estimates = estimate_ratio(params, grid, 200, 7, 1);
  REQUIRE(estimates.size() == 3);
  CHECK(estimates[0].xi == 0.0);
  CHECK(estimates[0].ratio == 1.0);
  CHECK(estimates[0].std_error == 0.0);
  CHECK(estimates[0].samples == 200);
  CHECK(estimates[0].seed == 7);
  for (const auto& est : estimates) {
    CHECK(est.std_error >= 0.0);
  }
}

TEST_CASE("a grid without zero gets the origin appended") {
  const EnsembleParams params{2, 8, 0.2, 0.0};
  const auto estimates = estimate_ratio(params, {0.5, 1.0}, 64, 7, 1);
  REQUIRE(estimates.size() == 3);
  CHECK(estimates[2].xi == 0.0);
  CHECK(estimates[2].ratio == 1.0);
}

TEST_CASE("ratio is exactly symmetric in xi") {
  const EnsembleParams params{2, 8, 0.2, 0.3};
  const std::vector<Real> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  const auto estimates = estimate_ratio(params, grid, 400, 3, 2);
  CHECK(estimates[0].ratio == estimates[4].ratio);
  CHECK(estimates[1].ratio == estimates[3].ratio);
  CHECK(estimates[0].std_error == estimates[4].std_error);
}

TEST_CASE("estimates are bit-identical across worker counts") {
  const EnsembleParams params{2, 8, 0.2, 0.0};
  const std::vector<Real> grid{0.0, 0.5, 1.0};
  const auto one = estimate_ratio(params, grid, 300, 42, 1);
  const auto two = estimate_ratio(params, grid, 300, 42, 2);
  const auto eight = estimate_ratio(params, grid, 300, 42, 8);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].ratio == two[i].ratio);
    CHECK(one[i].ratio == eight[i].ratio);
    CHECK(one[i].std_error == two[i].std_error);
    CHECK(one[i].std_error == eight[i].std_error);
  }
}

TEST_CASE("ratios are invariant under a common weight rescaling") {
  const EnsembleParams params{2, 8, 0.2, 0.0};
  WeightTable table = weight_table(params, {0.0, 0.7}, 128, 5, 1);
  const auto base = reduce_weight_table(table, params, 5);
  table.log_abs.array() += 123.456;  // multiply every weight by e^123.456
  const auto shifted = reduce_weight_table(table, params, 5);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(shifted[i].ratio ==
          doctest::Approx(base[i].ratio).epsilon(1e-12));
    CHECK(shifted[i].std_error ==
          doctest::Approx(base[i].std_error).epsilon(1e-10));
  }
}

TEST_CASE("degenerate batches are reported") {
  WeightTable table;
  table.xi = {0.0, 1.0};
  table.zero_index = 0;
  table.log_abs = MatrixXr::Zero(4, 2);
  table.sign = MatrixXr::Ones(4, 2);
  table.sign(2, 0) = -1.0;  // one batch denominator goes nonpositive
  McDiagnostics diagnostics;
  const EnsembleParams params{2, 8, 0.2, 0.0};
  (void)reduce_weight_table(table, params, 1, &diagnostics);
  CHECK(diagnostics.degenerate_batch);

  table.sign(2, 0) = 1.0;
  (void)reduce_weight_table(table, params, 1, &diagnostics);
  CHECK_FALSE(diagnostics.degenerate_batch);
}

TEST_CASE("sample count below two is rejected") {
  const EnsembleParams params{2, 8, 0.2, 0.0};
  CHECK_THROWS_AS((void)estimate_ratio(params, {0.0}, 1, 1, 1),
                  std::invalid_argument);
}
