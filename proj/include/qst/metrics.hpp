#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qst/dynamics.hpp"
#include "qst/eigensolver.hpp"
#include "qst/table.hpp"

namespace qst {

// QST drop: max_i |<site|eps_i>| - 1/sqrt(2). Zero when (|1> +- |N>)/sqrt(2)
// are eigenstates; range [-1/sqrt(2), 1 - 1/sqrt(2)].
double qst_drop(const EigenDecomposition& ed, std::size_t site = 1);

// Eigenmodes closest to psi_pm = (|1> +- |N>)/sqrt(2). Indices are 0-based
// positions in the ascending spectrum.
struct DimerModes {
  std::size_t index_plus = 0;
  std::size_t index_minus = 0;
  double e_plus = 0.0;
  double e_minus = 0.0;
  double overlap_plus = 0.0;
  double overlap_minus = 0.0;
  // Both projections peaked on the same eigenvector; resolved by parity.
  bool degenerate = false;
  // Both overlaps below 1/sqrt(2): no clear dimer doublet.
  bool ambiguous = false;
};

DimerModes identify_dimer_modes(const EigenDecomposition& ed);

// pi / |E+ - E-|; empty for an exactly degenerate pair.
std::optional<double> t_star_estimate(double e_plus, double e_minus);

// First time P_target(t) >= threshold within the horizon. The grid crossing is
// refined by bisection on the exact amplitude, so `ed` must be the
// decomposition the trajectory was built from.
std::optional<double> t_star_threshold(const Trajectory& traj, const EigenDecomposition& ed,
                                       std::size_t target, double threshold, double horizon);

// First local maximum above `floor` of P_target(t) after a centered moving
// average of width `window`. Requires a uniform grid with spacing <= window/10.
std::optional<double> t_star_smoothed(const Trajectory& traj, std::size_t target, double window,
                                      double floor = 0.5);

// Same detector on a bare uniformly sampled signal.
std::optional<double> smoothed_first_peak(std::span<const double> times,
                                          std::span<const double> signal, double window,
                                          double floor = 0.5);

// Moving-average peak detector fed one sample at a time. Positions are in
// sample units (parabolic refinement, so fractional).
class SmoothedPeakFinder {
 public:
  SmoothedPeakFinder(std::size_t half_width, double floor);

  // Returns true once a peak has been located.
  bool push(double sample);
  // Flushes the trailing samples with truncated windows.
  void finish();
  std::optional<double> peak() const { return peak_; }

 private:
  void emit(double smoothed);

  std::size_t half_width_;
  double floor_;
  std::vector<double> ring_;
  std::size_t count_ = 0;
  double sum_ = 0.0;
  std::size_t emitted_ = 0;
  double prev2_ = 0.0, prev1_ = 0.0;
  std::optional<double> peak_;
};

// Solves a (|d_m|^p - |d_{m+1}|^p) = j^2 for p in [0, 64] by bisection, where
// d_k = k - (N+1)/2 and sites m, m+1 are 1-based.
double p_threshold(std::size_t n_sites, double a, double j, std::pair<std::size_t, std::size_t> site_pair);

struct TransferReport {
  double drop = 0.0;
  double e_plus = 0.0;
  double e_minus = 0.0;
  double overlap_plus = 0.0;
  double overlap_minus = 0.0;
  std::optional<double> t_est;
  std::optional<double> t_threshold;
  std::optional<double> t_smoothed;
  std::optional<double> p_max;
  bool ambiguous = false;
  bool degenerate = false;
  // Dynamics stopped at ReportOptions::max_steps before the horizon.
  bool truncated = false;
};

struct ReportOptions {
  double threshold = 0.95;
  std::optional<double> horizon;  // default 20 t_est, or 200 without a dimer pair
  std::optional<double> window;   // default 3 * 2 pi / (lambda_max - lambda_min)
  std::optional<double> dt;       // default default_time_step()
  double relevance_floor = 0.5;
  bool dynamics = true;
  // Only the threshold time is needed; stop scanning at the crossing.
  bool threshold_only = false;
  std::size_t max_steps = 200'000'000;
};

double default_horizon(const DimerModes& modes, const std::optional<double>& t_est);
double default_window(const EigenDecomposition& ed);

// Spectral metrics plus, when enabled, transfer times from site 1 to site N
// scanned on a streaming grid.
TransferReport make_report(const EigenDecomposition& ed, const ReportOptions& opts = {});

// N,a,p,j_edge,j_bulk,F,E_plus,E_minus,ov_plus,ov_minus,t_est,t_thr,t_sm,p_max
std::vector<std::string> report_header();

struct ReportContext {
  std::size_t n_sites = 0;
  std::optional<double> a, p, j_edge, j_bulk;
};

std::vector<Cell> report_row(const ReportContext& ctx, const TransferReport& report);

}  // namespace qst
