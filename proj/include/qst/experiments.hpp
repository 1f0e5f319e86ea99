#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qst/chain_model.hpp"
#include "qst/metrics.hpp"
#include "qst/table.hpp"

namespace qst {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;       // J s (CODATA 2018, exact)
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg (CODATA 2018)
inline constexpr double rb87_mass = 86.909180527 * atomic_mass_unit;
}  // namespace constants

// Parameters of a power-law chain, optionally with explicit arrays that take
// precedence over (a, p) and (j_edge, j_bulk).
struct ChainConfig {
  std::size_t n_sites = 8;
  double a = 0.5;
  double p = 2.0;
  double j_edge = 1.0;
  double j_bulk = 1.0;
  std::optional<std::vector<double>> fields;
  std::optional<std::vector<double>> couplings;

  ChainSpec to_chain() const;
  ReportContext context() const;
};

struct SweepAxis {
  std::string name;  // one of n_sites, a, p, j_edge, j_bulk
  std::vector<double> values;
};

// Parses "name=start:stop:step", "name=log:start:stop:count" or "name=v1,v2,...".
SweepAxis parse_axis(const std::string& spec);

struct SweepGrid {
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  ChainConfig base;
  ReportOptions options;
  std::size_t max_points = 1'000'000;

  void validate() const;
  std::size_t size() const;
  // Point `index` in axis1-major order.
  ChainConfig point(std::size_t index) const;
};

struct SweepRow {
  ChainConfig config;
  TransferReport report;
  std::string status = "ok";
};

// Each point is evaluated independently on up to `threads` workers; rows come
// back in axis1-major order. Failures at a point are recorded in its status.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, unsigned threads = 1);

// Report columns followed by a status column.
Table sweep_table(const std::vector<SweepRow>& rows);

// One full report for a single chain; shared by the sweep runner and the CLI.
TransferReport evaluate_point(const ChainConfig& config, const ReportOptions& options);

// p, lambda_1..lambda_N, index_plus, index_minus (1-based indices).
Table scan_spectrum_vs_p(std::size_t n_sites, double a, double j_edge, double j_bulk,
                         const std::vector<double>& p_grid);

struct TstarRow {
  double a = 0.0;
  std::optional<double> t_threshold;
  std::optional<double> t_est;
};

std::vector<TstarRow> compare_tstar(std::size_t n_sites, double p, double j_edge, double j_bulk,
                                    const std::vector<double>& a_grid,
                                    const ReportOptions& options = {});

Table tstar_table(const std::vector<TstarRow>& rows);

struct LatticeParams {
  double mass = constants::rb87_mass;           // kg
  double trap_angular_frequency = 0.0;          // rad/s
  double lattice_spacing = 0.0;                 // m
  double hopping_over_hbar = 0.0;               // 1/s
};

// (m omega^2 a_lat^2 / 2) / (hbar J/hbar)
double experimental_ratio(const LatticeParams& params);

}  // namespace qst
