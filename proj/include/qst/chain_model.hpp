#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qst {

// Power-law on-site potential B_n = a * |n - c|^p, c the chain center.
struct PotentialSpec {
  double a = 0.0;
  double p = 0.0;
};

// XX chain with N sites, N-1 nearest-neighbour couplings J_n and N local
// fields B_n. Energies are in units of the bulk coupling J.
struct ChainSpec {
  std::size_t n_sites = 0;
  std::vector<double> couplings;
  std::vector<double> fields;

  // Throws std::invalid_argument when the shape or coupling signs are wrong.
  void validate() const;
};

// Single-excitation block of the XX Hamiltonian: a real symmetric
// tridiagonal matrix. diag[k] = 2 B_k, offdiag[k] = 2 J_k.
struct Hamiltonian1Ex {
  std::vector<double> diag;
  std::vector<double> offdiag;
  // Constant -sum_n B_n dropped from the diagonal. Only a global phase.
  double energy_offset = 0.0;

  std::size_t size() const { return diag.size(); }
  void validate() const;
  double frobenius_norm() const;
  // y = H x
  void apply(std::span<const double> x, std::span<double> y) const;
};

std::vector<double> build_fields(std::size_t n_sites, const PotentialSpec& pot);

// Couplings [j_edge, j_bulk, ..., j_bulk, j_edge]; for N <= 3 every coupling
// is an edge coupling.
ChainSpec build_chain(std::size_t n_sites, double j_edge, double j_bulk,
                      std::vector<double> fields);

Hamiltonian1Ex to_single_excitation(const ChainSpec& chain);

bool is_mirror_symmetric(const ChainSpec& chain, double tol);
bool is_mirror_symmetric(const Hamiltonian1Ex& h, double tol);

}  // namespace qst
