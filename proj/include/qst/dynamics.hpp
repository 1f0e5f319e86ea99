#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qst/chain_model.hpp"
#include "qst/eigensolver.hpp"
#include "qst/table.hpp"

namespace qst {

using Complex = std::complex<double>;

// Site amplitudes c_k(t) of a single excitation released from `source`.
// Sites are 1-based throughout the public API. Times are in units hbar/J.
struct Trajectory {
  std::size_t n_sites = 0;
  std::size_t source = 1;
  std::vector<double> times;
  std::vector<Complex> amplitudes;  // row t, column k
  std::vector<double> populations;  // |amplitudes|^2

  Complex amplitude(std::size_t t_index, std::size_t site) const {
    return amplitudes[t_index * n_sites + site - 1];
  }
  double population(std::size_t t_index, std::size_t site) const {
    return populations[t_index * n_sites + site - 1];
  }
  std::vector<double> population_series(std::size_t site) const;
  std::span<const Complex> state(std::size_t t_index) const {
    return {amplitudes.data() + t_index * n_sites, n_sites};
  }
};

// c_k(t) = sum_i v_i(k) v_i(source) exp(-i lambda_i t)
Trajectory evolve(const EigenDecomposition& ed, std::size_t source, std::span<const double> times);

Complex amplitude(const EigenDecomposition& ed, std::size_t source, std::size_t target, double t);

// Classical RK4 on i dc/dt = H c, fixed internal step with ||H||_inf dt <= 0.01.
// Independent of the eigensolver; used to cross-check evolve().
Trajectory integrate_oracle(const Hamiltonian1Ex& h, std::size_t source,
                            std::span<const double> times);

// <psi|H|psi> for one row of a trajectory.
double energy_expectation(const Hamiltonian1Ex& h, std::span<const Complex> state);

// 0, dt, 2 dt, ... up to and including t_max (within rounding).
std::vector<double> uniform_grid(double t_max, double dt);

// dt with (lambda_max - lambda_min) dt = 0.1, so the fastest relative phase
// is resolved. Depends on level differences only, so it is gauge invariant.
double default_time_step(const EigenDecomposition& ed);

// Populations of one target site on the grid t_k = k dt, produced one sample
// at a time without storing the trajectory. Phases advance by recurrence and
// are re-anchored to exp(-i lambda t_k) every few thousand steps.
class PopulationStream {
 public:
  PopulationStream(const EigenDecomposition& ed, std::size_t source, std::size_t target, double dt);

  double time() const { return static_cast<double>(step_) * dt_; }
  std::size_t step() const { return step_; }
  double dt() const { return dt_; }
  double population() const;
  void advance();

 private:
  void anchor();

  double dt_;
  std::size_t step_ = 0;
  std::vector<double> energies_;
  std::vector<double> weights_;
  std::vector<double> re_, im_;
  std::vector<double> step_re_, step_im_;
};

// Columns t,P_1..P_N and, with amplitudes, re_1,im_1,...,re_N,im_N.
Table trajectory_table(const Trajectory& traj, bool with_amplitudes);

}  // namespace qst
