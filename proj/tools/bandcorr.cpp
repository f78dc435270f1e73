// bandcorr: theoretical crossover curves, transfer-operator spectra and a
// Monte Carlo oracle for correlation ratios of characteristic polynomials of
// real symmetric Gaussian block band matrices.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bandcorr/errors.hpp"
#include "bandcorr/harmonics.hpp"
#include "bandcorr/limits.hpp"
#include "bandcorr/mc.hpp"
#include "bandcorr/scaling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bandcorr;

namespace {

constexpr const char* kCodeVersion = "bandcorr 1.0.0";
constexpr int kExitParameter = 2;
constexpr int kExitNumericalQuality = 3;

std::string fmt17(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// "min:max:count" (count inclusive endpoints) or a single value.
std::vector<Real> parse_grid(const std::string& text) {
  std::vector<Real> grid;
  const auto first = text.find(':');
  if (first == std::string::npos) {
    grid.push_back(std::stod(text));
    return grid;
  }
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos) {
    throw std::invalid_argument("grid must be 'min:max:count' or one value: " +
                                text);
  }
  const Real lo = std::stod(text.substr(0, first));
  const Real hi = std::stod(text.substr(first + 1, second - first - 1));
  const long count = std::stol(text.substr(second + 1));
  if (count < 1) throw std::invalid_argument("grid count must be >= 1");
  if (count == 1) {
    grid.push_back(lo);
    return grid;
  }
  for (long i = 0; i < count; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<Real>(i) /
                            static_cast<Real>(count - 1));
  }
  return grid;
}

std::vector<Real> parse_list(const std::string& text) {
  std::vector<Real> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  if (values.empty()) throw std::invalid_argument("empty value list");
  return values;
}

fs::path resolve_output(const std::string& out, const std::string& fallback) {
  fs::path path = out.empty() ? fs::path(fallback) : fs::path(out);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("BANDCORR_OUT_DIR")) {
      path = fs::path(dir) / path;
    }
  }
  return path;
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

void write_manifest(const fs::path& csv_path, const std::string& command,
                    const json& parameters, std::optional<std::uint64_t> seed,
                    double duration_seconds, const json& truncation,
                    const std::vector<fs::path>& outputs) {
  json manifest;
  manifest["command"] = command;
  manifest["code_version"] = kCodeVersion;
  manifest["parameters"] = parameters;
  if (seed) {
    manifest["seed"] = *seed;
  } else {
    manifest["seed"] = nullptr;
  }
  manifest["duration_seconds"] = duration_seconds;
  manifest["truncation"] = truncation;
  json out_list = json::array();
  for (const auto& p : outputs) out_list.push_back(p.string());
  manifest["outputs"] = out_list;

  fs::path path = csv_path;
  path += ".manifest.json";
  atomic_write(path, manifest.dump(2) + "\n");
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

int run_limit(const std::string& regime_tag, const std::string& xi_spec,
              Real energy, Real c_star, bool has_c_star, long n_blocks,
              long block_size, int truncation, int quadrature_order,
              const std::string& out) {
  const limits::Regime regime = limits::parse_regime(regime_tag);
  if (regime == limits::Regime::critical && !has_c_star) {
    throw std::invalid_argument("limit critical requires --Cstar");
  }
  if (regime == limits::Regime::finite && (n_blocks < 2 || block_size < 1)) {
    throw std::invalid_argument("limit finite requires --n >= 2 and --W >= 1");
  }

  const std::vector<Real> grid = parse_grid(xi_spec);
  limits::RegimeParams params;
  params.c_star = c_star;
  params.n_blocks = n_blocks;
  params.block_size = block_size;
  params.energy = energy;
  params.truncation = truncation;
  params.quadrature_order = quadrature_order;

  Timer timer;
  VectorXr xi = Eigen::Map<const VectorXr>(grid.data(), grid.size());
  const limits::RegimeCurve curve = limits::regime_curve(regime, params, xi);

  std::string csv = "xi,value,truncation_error\n";
  for (Index i = 0; i < curve.xi.size(); ++i) {
    csv += fmt17(curve.xi[i]) + "," + fmt17(curve.values[i]) + "," +
           fmt17(curve.truncation_error[i]) + "\n";
  }
  const fs::path path =
      resolve_output(out, "limit_" + std::string(regime_tag) + ".csv");
  atomic_write(path, csv);

  json parameters = {{"regime", regime_tag}, {"xi", xi_spec},
                     {"E", energy},          {"l", truncation},
                     {"quadrature_order", quadrature_order},
                     {"effective_quadrature_order",
                      quadrature_order > 0 ? quadrature_order
                                           : 2 * truncation + 8}};
  if (regime == limits::Regime::critical) parameters["Cstar"] = c_star;
  if (regime == limits::Regime::finite) {
    parameters["n"] = n_blocks;
    parameters["W"] = block_size;
  }
  const Real max_err = curve.max_truncation_error();
  json truncation_info = {{"max_truncation_error", max_err},
                          {"warn_threshold", limits::kTruncationWarnThreshold}};
  write_manifest(path, "limit", parameters, std::nullopt, timer.seconds(),
                 truncation_info, {path});

  std::cout << path.string() << "\n";
  if (max_err > limits::kTruncationWarnThreshold) {
    std::cerr << "warning: truncation error " << fmt17(max_err)
              << " above threshold; increase --l\n";
    return kExitNumericalQuality;
  }
  return 0;
}

int run_spectrum(int truncation, const std::string& p_spec,
                 int quadrature_order, const std::string& out) {
  const std::vector<Real> p_values = parse_list(p_spec);
  for (Real p : p_values) {
    if (!(p > 0.0)) throw std::invalid_argument("spectrum: p values must be > 0");
  }

  Timer timer;
  std::string csv = "j,p,lambda_j,asymptotic_1_minus_(j+1)(j+2)/p\n";
  for (int j = 0; j < truncation; ++j) {
    for (Real p : p_values) {
      const Real lambda = harmonics::transfer_eigenvalue(j, p, quadrature_order);
      const Real asym = 1.0 - (j + 1.0) * (j + 2.0) / p;
      csv += std::to_string(j) + "," + fmt17(p) + "," + fmt17(lambda) + "," +
             fmt17(asym) + "\n";
    }
  }
  const fs::path path = resolve_output(out, "spectrum.csv");
  atomic_write(path, csv);

  const harmonics::TridiagonalNu nu =
      harmonics::nu_matrix(truncation, quadrature_order);
  const VectorXr laplace = harmonics::laplace_spectrum(truncation);
  std::string op_csv = "j,nu_diagonal,nu_offdiag_to_next,laplace_eigenvalue\n";
  for (int j = 0; j < truncation; ++j) {
    const Real off = (j + 1 < truncation)
                         ? nu.off_diagonal[j]
                         : std::numeric_limits<Real>::quiet_NaN();
    op_csv += std::to_string(j) + "," + fmt17(nu.diagonal[j]) + "," +
              fmt17(off) + "," + fmt17(laplace[j]) + "\n";
  }
  fs::path op_path = path;
  op_path.replace_extension();
  op_path += ".operator.csv";
  atomic_write(op_path, op_csv);

  json parameters = {{"l", truncation},
                     {"p", p_spec},
                     {"quadrature_order", quadrature_order},
                     {"effective_quadrature_order",
                      quadrature_order > 0 ? json(quadrature_order)
                                           : json("adaptive")}};
  const double elapsed = timer.seconds();
  write_manifest(path, "spectrum", parameters, std::nullopt, elapsed,
                 json(nullptr), {path, op_path});
  write_manifest(op_path, "spectrum", parameters, std::nullopt, elapsed,
                 json(nullptr), {path, op_path});
  std::cout << path.string() << "\n" << op_path.string() << "\n";
  return 0;
}

int run_mc(long n_blocks, long block_size, Real beta, Real energy,
           const std::string& xi_spec, long samples, std::uint64_t seed,
           int workers, int quadrature_order, const std::string& out) {
  mc::EnsembleParams params{n_blocks, block_size, beta, energy};
  mc::validate(params);
  const std::vector<Real> grid = parse_grid(xi_spec);

  Timer timer;
  mc::McDiagnostics diagnostics;
  const std::vector<mc::McEstimate> estimates =
      mc::estimate_ratio(params, grid, samples, seed, workers, &diagnostics);

  std::string csv = "xi,ratio,std_error,samples\n";
  for (const auto& est : estimates) {
    csv += fmt17(est.xi) + "," + fmt17(est.ratio) + "," +
           fmt17(est.std_error) + "," + std::to_string(est.samples) + "\n";
  }
  const fs::path path = resolve_output(out, "mc.csv");
  atomic_write(path, csv);

  json parameters = {{"n", n_blocks},   {"W", block_size},
                     {"beta", beta},    {"E", energy},
                     {"xi", xi_spec},   {"samples", samples},
                     {"workers", workers},
                     {"quadrature_order", quadrature_order}};
  write_manifest(path, "mc", parameters, seed, timer.seconds(), json(nullptr),
                 {path});
  std::cout << path.string() << "\n";

  if (diagnostics.degenerate_batch) {
    std::cerr << "warning: degenerate batch (denominator sum <= 0); "
                 "increase --samples\n";
    return kExitNumericalQuality;
  }
  return 0;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<Real>> rows;
};

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (first) {
      while (std::getline(ss, cell, ',')) table.header.push_back(cell);
      first = false;
      continue;
    }
    std::vector<Real> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    table.rows.push_back(std::move(row));
  }
  return table;
}

int run_compare(const std::string& mc_file, const std::string& limit_file,
                int quadrature_order, const std::string& out) {
  const CsvTable mc_table = read_csv(mc_file);
  const CsvTable limit_table = read_csv(limit_file);

  Timer timer;
  std::vector<std::string> mismatches;
  std::string csv = "xi,mc_ratio,std_error,theory,abs_diff,z_score\n";
  std::size_t rows = std::min(mc_table.rows.size(), limit_table.rows.size());
  if (mc_table.rows.size() != limit_table.rows.size()) {
    mismatches.push_back("row counts differ (" +
                         std::to_string(mc_table.rows.size()) + " vs " +
                         std::to_string(limit_table.rows.size()) + ")");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const Real xi_mc = mc_table.rows[i][0];
    const Real xi_th = limit_table.rows[i][0];
    if (xi_mc != xi_th) {
      mismatches.push_back("xi " + fmt17(xi_mc) + " vs " + fmt17(xi_th));
      continue;
    }
    const Real ratio = mc_table.rows[i][1];
    const Real std_error = mc_table.rows[i][2];
    const Real theory = limit_table.rows[i][1];
    const Real abs_diff = std::abs(ratio - theory);
    const Real z = std_error > 0.0
                       ? abs_diff / std_error
                       : std::numeric_limits<Real>::infinity();
    csv += fmt17(xi_mc) + "," + fmt17(ratio) + "," + fmt17(std_error) + "," +
           fmt17(theory) + "," + fmt17(abs_diff) + "," + fmt17(z) + "\n";
  }
  if (!mismatches.empty()) {
    std::cerr << "error: grids do not align:\n";
    for (const auto& m : mismatches) std::cerr << "  " << m << "\n";
    return kExitParameter;
  }

  const fs::path path = resolve_output(out, "compare.csv");
  atomic_write(path, csv);
  json parameters = {{"mc", mc_file},
                     {"limit", limit_file},
                     {"quadrature_order", quadrature_order}};
  write_manifest(path, "compare", parameters, std::nullopt, timer.seconds(),
                 json(nullptr), {path});
  std::cout << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation crossover toolkit for Gaussian block band "
               "matrices"};
  app.require_subcommand(1);

  // limit
  std::string limit_regime;
  std::string limit_xi = "0:3:31";
  Real limit_energy = 0.0;
  Real limit_c_star = 0.0;
  long limit_n = 0;
  long limit_w = 0;
  int limit_l = 30;
  int limit_quadrature = 0;
  std::string limit_out;
  auto* limit_cmd =
      app.add_subcommand("limit", "Theoretical regime curve over a xi grid");
  limit_cmd
      ->add_option("regime", limit_regime,
                   "localized | critical | delocalized | finite")
      ->required();
  limit_cmd->add_option("--xi", limit_xi, "grid min:max:count (inclusive)");
  limit_cmd->add_option("--E", limit_energy, "bulk energy (finite regime)");
  auto* c_star_opt =
      limit_cmd->add_option("--Cstar", limit_c_star, "C* coupling (critical)");
  limit_cmd->add_option("--n", limit_n, "block count (finite regime)");
  limit_cmd->add_option("--W", limit_w, "block size (finite regime)");
  limit_cmd->add_option("--l", limit_l, "basis truncation");
  limit_cmd->add_option("--quadrature-order", limit_quadrature,
                        "override the quadrature order");
  limit_cmd->add_option("--out", limit_out, "output CSV path");

  // spectrum
  int spectrum_l = 8;
  std::string spectrum_p;
  int spectrum_quadrature = 0;
  std::string spectrum_out;
  auto* spectrum_cmd = app.add_subcommand(
      "spectrum", "Transfer-operator eigenvalues and operator data");
  spectrum_cmd->add_option("--l", spectrum_l, "basis truncation");
  spectrum_cmd->add_option("--p", spectrum_p, "comma-separated p values (> 0)")
      ->required();
  spectrum_cmd->add_option("--quadrature-order", spectrum_quadrature,
                           "override the quadrature order");
  spectrum_cmd->add_option("--out", spectrum_out, "output CSV path");

  // mc
  long mc_n = 1;
  long mc_w = 32;
  Real mc_beta = 0.2;
  Real mc_energy = 0.0;
  std::string mc_xi = "0:1:3";
  long mc_samples = 0;
  std::uint64_t mc_seed = 0;
  int mc_workers = 0;
  int mc_quadrature = 0;
  std::string mc_out;
  auto* mc_cmd =
      app.add_subcommand("mc", "Monte Carlo ratio estimate for the ensemble");
  mc_cmd->add_option("--n", mc_n, "number of blocks");
  mc_cmd->add_option("--W", mc_w, "block size");
  mc_cmd->add_option("--beta", mc_beta, "coupling in (0, 1/4)");
  mc_cmd->add_option("--E", mc_energy, "bulk energy in (-2, 2)");
  mc_cmd->add_option("--xi", mc_xi, "grid min:max:count or one value");
  mc_cmd->add_option("--samples", mc_samples, "sample count")->required();
  mc_cmd->add_option("--seed", mc_seed, "64-bit seed (required)")->required();
  mc_cmd->add_option("--workers", mc_workers,
                     "worker threads (0 = hardware)");
  mc_cmd->add_option("--quadrature-order", mc_quadrature,
                     "recorded in the manifest; unused by mc");
  mc_cmd->add_option("--out", mc_out, "output CSV path");

  // compare
  std::string compare_mc;
  std::string compare_limit;
  int compare_quadrature = 0;
  std::string compare_out;
  auto* compare_cmd =
      app.add_subcommand("compare", "Join an mc CSV with a limit CSV");
  compare_cmd->add_option("--mc", compare_mc, "mc CSV path")->required();
  compare_cmd->add_option("--limit", compare_limit, "limit CSV path")
      ->required();
  compare_cmd->add_option("--quadrature-order", compare_quadrature,
                          "recorded in the manifest; unused by compare");
  compare_cmd->add_option("--out", compare_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitParameter;
  }

  try {
    if (limit_cmd->parsed()) {
      return run_limit(limit_regime, limit_xi, limit_energy, limit_c_star,
                       c_star_opt->count() > 0, limit_n, limit_w, limit_l,
                       limit_quadrature, limit_out);
    }
    if (spectrum_cmd->parsed()) {
      return run_spectrum(spectrum_l, spectrum_p, spectrum_quadrature,
                          spectrum_out);
    }
    if (mc_cmd->parsed()) {
      return run_mc(mc_n, mc_w, mc_beta, mc_energy, mc_xi, mc_samples, mc_seed,
                    mc_workers, mc_quadrature, mc_out);
    }
    if (compare_cmd->parsed()) {
      return run_compare(compare_mc, compare_limit, compare_quadrature,
                         compare_out);
    }
  } catch (const NumericalQualityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalQuality;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
