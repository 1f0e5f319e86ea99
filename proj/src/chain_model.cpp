#include "qst/chain_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qst {

void ChainSpec::validate() const {
  if (n_sites < 2)
    throw std::invalid_argument("chain needs at least 2 sites, got " + std::to_string(n_sites));
  if (couplings.size() != n_sites - 1)
    throw std::invalid_argument("expected " + std::to_string(n_sites - 1) + " couplings, got " +
                                std::to_string(couplings.size()));
  if (fields.size() != n_sites)
    throw std::invalid_argument("expected " + std::to_string(n_sites) + " fields, got " +
                                std::to_string(fields.size()));
  for (std::size_t k = 0; k < couplings.size(); ++k) {
    if (!std::isfinite(couplings[k]) || couplings[k] <= 0.0)
      throw std::invalid_argument("coupling J_" + std::to_string(k + 1) +
                                  " must be positive and finite");
  }
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (!std::isfinite(fields[k]))
      throw std::invalid_argument("field B_" + std::to_string(k + 1) + " is not finite");
  }
}

void Hamiltonian1Ex::validate() const {
  if (diag.empty()) throw std::invalid_argument("empty Hamiltonian");
  if (offdiag.size() + 1 != diag.size())
    throw std::invalid_argument("offdiag length must be diag length - 1");
  for (double d : diag)
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite diagonal entry");
  for (double e : offdiag)
    if (!std::isfinite(e) || e == 0.0)
      throw std::invalid_argument("off-diagonal entries must be finite and nonzero");
}

double Hamiltonian1Ex::frobenius_norm() const {
  double s = 0.0;
  for (double d : diag) s += d * d;
  for (double e : offdiag) s += 2.0 * e * e;
  return std::sqrt(s);
}

void Hamiltonian1Ex::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = diag.size();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = diag[k] * x[k];
    if (k > 0) acc += offdiag[k - 1] * x[k - 1];
    if (k + 1 < n) acc += offdiag[k] * x[k + 1];
    y[k] = acc;
  }
}

std::vector<double> build_fields(std::size_t n_sites, const PotentialSpec& pot) {
  if (n_sites < 2) throw std::invalid_argument("build_fields: n_sites must be >= 2");
  if (!std::isfinite(pot.a) || !std::isfinite(pot.p))
    throw std::invalid_argument("build_fields: a and p must be finite");
  if (pot.a < 0.0 || pot.p < 0.0)
    throw std::invalid_argument("build_fields: a and p must be non-negative");

  // Centered at (N+1)/2 so that B_n == B_{N-n+1} bit for bit.
  const double center = 0.5 * static_cast<double>(n_sites + 1);
  std::vector<double> fields(n_sites);
  for (std::size_t n = 1; n <= n_sites; ++n) {
    const double dist = std::fabs(static_cast<double>(n) - center);
    // std::pow(0, 0) == 1, which gives the flat field for p = 0.
    fields[n - 1] = pot.a * std::pow(dist, pot.p);
  }
  return fields;
}

ChainSpec build_chain(std::size_t n_sites, double j_edge, double j_bulk,
                      std::vector<double> fields) {
  if (!(j_edge > 0.0) || !(j_bulk > 0.0) || !std::isfinite(j_edge) || !std::isfinite(j_bulk))
    throw std::invalid_argument("build_chain: couplings must be positive and finite");
  if (n_sites < 2) throw std::invalid_argument("build_chain: n_sites must be >= 2");

  ChainSpec chain;
  chain.n_sites = n_sites;
  chain.couplings.assign(n_sites - 1, j_bulk);
  chain.couplings.front() = j_edge;
  chain.couplings.back() = j_edge;
  chain.fields = std::move(fields);
  chain.validate();
  return chain;
}

Hamiltonian1Ex to_single_excitation(const ChainSpec& chain) {
  chain.validate();
  Hamiltonian1Ex h;
  h.diag.resize(chain.n_sites);
  h.offdiag.resize(chain.n_sites - 1);
  double field_sum = 0.0;
  for (std::size_t k = 0; k < chain.n_sites; ++k) {
    h.diag[k] = 2.0 * chain.fields[k];
    field_sum += chain.fields[k];
  }
  for (std::size_t k = 0; k + 1 < chain.n_sites; ++k) h.offdiag[k] = 2.0 * chain.couplings[k];
  h.energy_offset = -field_sum;
  return h;
}

bool is_mirror_symmetric(const ChainSpec& chain, double tol) {
  if (tol < 0.0) throw std::invalid_argument("is_mirror_symmetric: tol must be >= 0");
  const std::size_t n = chain.n_sites;
  for (std::size_t k = 0; k < chain.fields.size(); ++k)
    if (std::fabs(chain.fields[k] - chain.fields[n - 1 - k]) > tol) return false;
  const std::size_t m = chain.couplings.size();
  for (std::size_t k = 0; k < m; ++k)
    if (std::fabs(chain.couplings[k] - chain.couplings[m - 1 - k]) > tol) return false;
  return true;
}

bool is_mirror_symmetric(const Hamiltonian1Ex& h, double tol) {
  const std::size_t n = h.diag.size();
  for (std::size_t k = 0; k < n; ++k)
    if (std::fabs(h.diag[k] - h.diag[n - 1 - k]) > tol) return false;
  const std::size_t m = h.offdiag.size();
  for (std::size_t k = 0; k < m; ++k)
    if (std::fabs(h.offdiag[k] - h.offdiag[m - 1 - k]) > tol) return false;
  return true;
}

}  // namespace qst
