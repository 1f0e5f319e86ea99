#pragma once

// Reference computations used only by the tests. None of these touch the
// library's QL solver or spectral propagator.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "qst/chain_model.hpp"

namespace qst::oracle {

struct Dense {
  std::size_t n = 0;
  std::vector<double> a;  // row-major
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline Dense dense_from(const Hamiltonian1Ex& h) {
  Dense m{h.size(), std::vector<double>(h.size() * h.size(), 0.0)};
  for (std::size_t k = 0; k < h.size(); ++k) m(k, k) = h.diag[k];
  for (std::size_t k = 0; k + 1 < h.size(); ++k) m(k, k + 1) = m(k + 1, k) = h.offdiag[k];
  return m;
}

// Cyclic Jacobi. Returns (values, vectors) with vectors[i][k] = component k of
// eigenvector i; values are unsorted.
inline std::pair<std::vector<double>, std::vector<std::vector<double>>> jacobi_eigen(Dense m) {
  const std::size_t n = m.n;
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (off < 1e-32) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(m(p, q)) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2 * m(p, q));
        const double t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double rp = m(r, p), rq = m(r, q);
          m(r, p) = c * rp - s * rq;
          m(r, q) = s * rp + c * rq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double pr = m(p, r), qr = m(q, r);
          m(p, r) = c * pr - s * qr;
          m(q, r) = s * pr + c * qr;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vp = v[p][r], vq = v[q][r];
          v[p][r] = c * vp - s * vq;
          v[q][r] = s * vp + c * vq;
        }
      }
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = m(i, i);
  return {values, v};
}

// Full 2^N spin Hamiltonian sum J_n (sx sx + sy sy) + sum B_n sz, restricted
// to basis states with exactly one spin up. Bit n set = spin up at site n+1.
// Returns the N x N block (sites ordered 1..N).
inline Dense spin_single_excitation_block(const ChainSpec& chain) {
  const std::size_t n = chain.n_sites;
  const std::uint64_t dim = 1ULL << n;
  using C = std::complex<double>;
  // Matrix elements <bra|H|ket> computed by applying Pauli strings to ket.
  auto element = [&](std::uint64_t bra, std::uint64_t ket) {
    C acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const double sz = (ket >> s & 1) ? 1.0 : -1.0;
      if (bra == ket) acc += chain.fields[s] * sz;
    }
    for (std::size_t s = 0; s + 1 < n; ++s) {
      // sx flips the bit; sy flips it with phase i*(+1 if bit was 0 else -1)
      const std::uint64_t flipped = ket ^ (1ULL << s) ^ (1ULL << (s + 1));
      if (flipped != bra) continue;
      const C y1 = (ket >> s & 1) ? C(0, -1) : C(0, 1);
      const C y2 = (ket >> (s + 1) & 1) ? C(0, -1) : C(0, 1);
      acc += chain.couplings[s] * (C(1.0) + y1 * y2);
    }
    return acc;
  };
  Dense block{n, std::vector<double>(n * n, 0.0)};
  std::vector<std::uint64_t> states;
  for (std::uint64_t s = 0; s < dim; ++s)
    if (__builtin_popcountll(s) == 1) states.push_back(s);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) block(i, j) = element(states[i], states[j]).real();
  return block;
}

}  // namespace qst::oracle
