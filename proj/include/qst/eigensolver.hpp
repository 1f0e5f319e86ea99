#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qst/chain_model.hpp"
#include "qst/table.hpp"

namespace qst {

enum class Parity { none, even, odd };

const char* to_string(Parity p);

// Ascending eigenvalues with orthonormal, phase-fixed eigenvectors.
// Vectors are stored column-major: component n of vector i is at
// vectors[i * size + n].
struct EigenDecomposition {
  std::size_t size = 0;
  std::vector<double> values;
  std::vector<double> vectors;
  // Empty unless the decomposed matrix was mirror symmetric.
  std::vector<Parity> parity;

  std::span<const double> vector(std::size_t i) const {
    return {vectors.data() + i * size, size};
  }
  std::span<double> vector(std::size_t i) { return {vectors.data() + i * size, size}; }
  // Component of eigenvector i on site n (0-based).
  double component(std::size_t i, std::size_t n) const { return vectors[i * size + n]; }
};

struct DecomposeOptions {
  // Solve mirror-symmetric inputs as separate even and odd tridiagonal blocks.
  // The resulting eigenvectors have exact parity even inside near-degenerate
  // doublets. When false the full matrix is reduced and degenerate clusters
  // are rotated to definite parity afterwards.
  bool use_mirror_blocks = true;
};

// Implicit-shift QL on the tridiagonal form. Throws NumericalError when an
// eigenvalue fails to converge within 50 N sweeps in total.
EigenDecomposition decompose(const Hamiltonian1Ex& h, const DecomposeOptions& opts = {});

// Closed form for the flat, uniformly coupled open chain with hopping tau:
// lambda_k = 2 tau cos(k pi / (N+1)), v_k(n) = sqrt(2/(N+1)) sin(n k pi / (N+1)).
EigenDecomposition uniform_chain_reference(std::size_t n_sites, double tau);

// max_i ||H v_i - lambda_i v_i||_2 / ||H||_F
double residual_norm(const Hamiltonian1Ex& h, const EigenDecomposition& ed);

// Flip signs so the first component with magnitude > 1e-12 is positive.
void fix_phases(EigenDecomposition& ed);

// Label each vector even/odd under n -> N+1-n when it matches to 1e-8.
void assign_parity(EigenDecomposition& ed);

// index,value,parity,v_1,...,v_N (one row per eigenpair)
Table eigen_table(const EigenDecomposition& ed);

}  // namespace qst
