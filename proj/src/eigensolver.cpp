#include "qst/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qst/errors.hpp"
#include "qst/table.hpp"

namespace qst {

namespace {

constexpr double kPhaseFloor = 1e-12;
constexpr double kParityTol = 1e-8;
constexpr double kClusterGap = 1e-12;  // relative to ||H||_F
constexpr double kMirrorTol = 1e-13;   // relative to ||H||_F

// Symmetric tridiagonal QL with implicit shifts (EISPACK tql2 lineage).
// d: diagonal (overwritten by eigenvalues, unsorted)
// e: off-diagonal, e[k] couples k and k+1; resized to n internally
// z: column-major n x n, overwritten by eigenvectors
void tridiagonal_ql(std::vector<double>& d, std::vector<double> e, std::vector<double>& z) {
  const std::size_t n = d.size();
  z.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  if (n == 1) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;

  const double eps = std::numeric_limits<double>::epsilon();
  const std::size_t max_iter = 50 * n;
  std::size_t total_iter = 0;
  double shift_acc = 0.0;
  double tst1 = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::fabs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      do {
        if (++total_iter > max_iter)
          throw NumericalError("tridiagonal QL did not converge within " +
                               std::to_string(max_iter) + " iterations");

        // Shift from the leading 2x2 block.
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        shift_acc += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);

          double* zi = z.data() + ii * n;
          double* zi1 = z.data() + (ii + 1) * n;
          for (std::size_t k = 0; k < n; ++k) {
            h = zi1[k];
            zi1[k] = s * zi[k] + c * h;
            zi[k] = c * zi[k] - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::fabs(e[l]) > eps * tst1);
    }
    d[l] += shift_acc;
    e[l] = 0.0;
  }
}

void sort_ascending(EigenDecomposition& ed) {
  const std::size_t n = ed.size;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ed.values[a] < ed.values[b]; });
  std::vector<double> values(n), vectors(n * n);
  std::vector<Parity> parity;
  if (!ed.parity.empty()) parity.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = ed.values[order[i]];
    std::copy_n(ed.vectors.begin() + static_cast<std::ptrdiff_t>(order[i] * n), n,
                vectors.begin() + static_cast<std::ptrdiff_t>(i * n));
    if (!parity.empty()) parity[i] = ed.parity[order[i]];
  }
  ed.values = std::move(values);
  ed.vectors = std::move(vectors);
  ed.parity = std::move(parity);
}

// Cyclic Jacobi for a small dense symmetric matrix a (k x k, row-major).
// Returns eigenvectors column-major in w; a is overwritten.
void small_jacobi(std::vector<double>& a, std::size_t k, std::vector<double>& w) {
  w.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) w[i * k + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) off += a[p * k + q] * a[p * k + q];
    if (off < 1e-30) return;
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double apq = a[p * k + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < k; ++r) {
          const double arp = a[r * k + p], arq = a[r * k + q];
          a[r * k + p] = c * arp - s * arq;
          a[r * k + q] = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double apr = a[p * k + r], aqr = a[q * k + r];
          a[p * k + r] = c * apr - s * aqr;
          a[q * k + r] = s * apr + c * aqr;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double wrp = w[p * k + r], wrq = w[q * k + r];
          w[p * k + r] = c * wrp - s * wrq;
          w[q * k + r] = s * wrp + c * wrq;
        }
      }
    }
  }
}

// Modified Gram-Schmidt on vectors [first, last); for mirror-symmetric input
// the cluster is additionally rotated onto eigenvectors of the reflection.
void settle_cluster(EigenDecomposition& ed, std::size_t first, std::size_t last, bool mirror) {
  const std::size_t n = ed.size;
  for (std::size_t i = first; i < last; ++i) {
    auto vi = ed.vector(i);
    for (std::size_t j = first; j < i; ++j) {
      auto vj = ed.vector(j);
      const double proj = std::inner_product(vi.begin(), vi.end(), vj.begin(), 0.0);
      for (std::size_t k = 0; k < n; ++k) vi[k] -= proj * vj[k];
    }
    const double norm = std::sqrt(std::inner_product(vi.begin(), vi.end(), vi.begin(), 0.0));
    for (double& x : vi) x /= norm;
  }
  if (!mirror) return;

  const std::size_t k = last - first;
  std::vector<double> refl(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      auto va = ed.vector(first + a);
      auto vb = ed.vector(first + b);
      double s = 0.0;
      for (std::size_t m = 0; m < n; ++m) s += va[m] * vb[n - 1 - m];
      refl[a * k + b] = s;
    }
  std::vector<double> w;
  small_jacobi(refl, k, w);
  std::vector<double> rotated(k * n, 0.0);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t a = 0; a < k; ++a) {
      auto va = ed.vector(first + a);
      const double coef = w[c * k + a];
      for (std::size_t m = 0; m < n; ++m) rotated[c * n + m] += coef * va[m];
    }
  std::copy(rotated.begin(), rotated.end(),
            ed.vectors.begin() + static_cast<std::ptrdiff_t>(first * n));
}

EigenDecomposition decompose_full(const Hamiltonian1Ex& h, bool mirror) {
  EigenDecomposition ed;
  ed.size = h.size();
  ed.values = h.diag;
  tridiagonal_ql(ed.values, h.offdiag, ed.vectors);
  sort_ascending(ed);

  const double gap_tol = kClusterGap * h.frobenius_norm();
  std::size_t first = 0;
  for (std::size_t i = 1; i <= ed.size; ++i) {
    if (i == ed.size || ed.values[i] - ed.values[i - 1] >= gap_tol) {
      if (i - first > 1) settle_cluster(ed, first, i, mirror);
      first = i;
    }
  }
  return ed;
}

// Even/odd blocks of a mirror-symmetric tridiagonal matrix. Each block is
// itself tridiagonal; eigenvectors are lifted back with exact parity.
EigenDecomposition decompose_mirror(const Hamiltonian1Ex& h) {
  const std::size_t n = h.size();
  const std::size_t half = n / 2;
  const bool odd_n = (n % 2) == 1;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  // Average mirrored entries so both halves see identical numbers.
  auto d_at = [&](std::size_t k) { return 0.5 * (h.diag[k] + h.diag[n - 1 - k]); };
  auto e_at = [&](std::size_t k) {
    return 0.5 * (h.offdiag[k] + h.offdiag[h.offdiag.size() - 1 - k]);
  };

  std::vector<double> even_d, even_e, odd_d, odd_e;
  for (std::size_t k = 0; k < half; ++k) {
    even_d.push_back(d_at(k));
    odd_d.push_back(d_at(k));
  }
  for (std::size_t k = 0; k + 1 < half; ++k) {
    even_e.push_back(e_at(k));
    odd_e.push_back(e_at(k));
  }
  if (odd_n) {
    even_d.push_back(h.diag[half]);
    if (half > 0) even_e.push_back(std::numbers::sqrt2 * e_at(half - 1));
  } else {
    even_d.back() += e_at(half - 1);
    odd_d.back() -= e_at(half - 1);
  }

  EigenDecomposition ed;
  ed.size = n;
  ed.values.reserve(n);
  ed.vectors.assign(n * n, 0.0);
  ed.parity.reserve(n);

  auto lift = [&](std::vector<double> d, const std::vector<double>& e, Parity parity) {
    if (d.empty()) return;
    std::vector<double> z;
    tridiagonal_ql(d, e, z);
    const std::size_t m = d.size();
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t col = ed.values.size();
      ed.values.push_back(d[j]);
      ed.parity.push_back(parity);
      auto v = ed.vector(col);
      const double sign = parity == Parity::even ? 1.0 : -1.0;
      for (std::size_t k = 0; k < half; ++k) {
        v[k] = z[j * m + k] * inv_sqrt2;
        v[n - 1 - k] = sign * z[j * m + k] * inv_sqrt2;
      }
      if (odd_n && parity == Parity::even) v[half] = z[j * m + half];
    }
  };
  lift(std::move(even_d), even_e, Parity::even);
  lift(std::move(odd_d), odd_e, Parity::odd);
  sort_ascending(ed);
  return ed;
}

}  // namespace

const char* to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::none: break;
  }
  return "none";
}

void fix_phases(EigenDecomposition& ed) {
  for (std::size_t i = 0; i < ed.size; ++i) {
    auto v = ed.vector(i);
    auto lead = std::find_if(v.begin(), v.end(), [](double x) { return std::fabs(x) > kPhaseFloor; });
    if (lead != v.end() && *lead < 0)
      for (double& x : v) x = -x;
  }
}

void assign_parity(EigenDecomposition& ed) {
  const std::size_t n = ed.size;
  ed.parity.assign(n, Parity::none);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = ed.vector(i);
    double dev_even = 0.0, dev_odd = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      dev_even = std::max(dev_even, std::fabs(v[k] - v[n - 1 - k]));
      dev_odd = std::max(dev_odd, std::fabs(v[k] + v[n - 1 - k]));
    }
    if (dev_even <= kParityTol)
      ed.parity[i] = Parity::even;
    else if (dev_odd <= kParityTol)
      ed.parity[i] = Parity::odd;
  }
}

EigenDecomposition decompose(const Hamiltonian1Ex& h, const DecomposeOptions& opts) {
  h.validate();
  const bool mirror = is_mirror_symmetric(h, kMirrorTol * h.frobenius_norm());
  EigenDecomposition ed = (mirror && opts.use_mirror_blocks) ? decompose_mirror(h)
                                                             : decompose_full(h, mirror);
  fix_phases(ed);
  if (mirror)
    assign_parity(ed);
  else
    ed.parity.clear();
  return ed;
}

EigenDecomposition uniform_chain_reference(std::size_t n_sites, double tau) {
  if (n_sites < 1) throw std::invalid_argument("uniform_chain_reference: n_sites must be >= 1");
  if (tau == 0.0 || !std::isfinite(tau))
    throw std::invalid_argument("uniform_chain_reference: tau must be finite and nonzero");
  const std::size_t n = n_sites;
  const double theta = std::numbers::pi / static_cast<double>(n + 1);
  const double norm = std::sqrt(2.0 / static_cast<double>(n + 1));

  EigenDecomposition ed;
  ed.size = n;
  ed.values.resize(n);
  ed.vectors.resize(n * n);
  for (std::size_t k = 1; k <= n; ++k) {
    ed.values[k - 1] = 2.0 * tau * std::cos(static_cast<double>(k) * theta);
    for (std::size_t site = 1; site <= n; ++site)
      ed.vectors[(k - 1) * n + site - 1] =
          norm * std::sin(static_cast<double>(site * k) * theta);
  }
  sort_ascending(ed);
  fix_phases(ed);
  assign_parity(ed);
  return ed;
}

double residual_norm(const Hamiltonian1Ex& h, const EigenDecomposition& ed) {
  const std::size_t n = h.size();
  if (ed.size != n || ed.values.size() != n || ed.vectors.size() != n * n)
    throw std::invalid_argument("residual_norm: dimension mismatch");
  const double hnorm = h.frobenius_norm();
  std::vector<double> hv(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = ed.vector(i);
    h.apply(v, hv);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = hv[k] - ed.values[i] * v[k];
      s += r * r;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return hnorm > 0 ? worst / hnorm : worst;
}

Table eigen_table(const EigenDecomposition& ed) {
  Table table;
  table.header = {"index", "value", "parity"};
  for (std::size_t k = 1; k <= ed.size; ++k) table.header.push_back("v_" + std::to_string(k));
  for (std::size_t i = 0; i < ed.size; ++i) {
    std::vector<Cell> row{Cell{static_cast<std::int64_t>(i + 1)}, Cell{ed.values[i]},
                          Cell{std::string(to_string(ed.parity.empty() ? Parity::none : ed.parity[i]))}};
    for (double x : ed.vector(i)) row.emplace_back(x);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace qst
