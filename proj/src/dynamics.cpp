#include "qst/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qst/errors.hpp"

namespace qst {

namespace {

constexpr std::size_t kAnchorInterval = 4096;
constexpr double kOracleStep = 0.01;  // ||H||_inf * dt
constexpr double kMaxOracleSteps = 1e9;

void check_site(std::size_t site, std::size_t n, const char* what) {
  if (site < 1 || site > n)
    throw std::invalid_argument(std::string(what) + " site " + std::to_string(site) +
                                " outside 1.." + std::to_string(n));
}

void check_times(std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("empty time grid");
  if (!std::isfinite(times[0]) || times[0] < 0.0)
    throw std::invalid_argument("time grid must start at t >= 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!std::isfinite(times[i]) || times[i] < times[i - 1])
      throw std::invalid_argument("time grid must be finite and ascending");
}

void fill_populations(Trajectory& traj) {
  traj.populations.resize(traj.amplitudes.size());
  std::transform(traj.amplitudes.begin(), traj.amplitudes.end(), traj.populations.begin(),
                 [](Complex c) { return std::norm(c); });
}

}  // namespace

std::vector<double> Trajectory::population_series(std::size_t site) const {
  check_site(site, n_sites, "population");
  std::vector<double> out(times.size());
  for (std::size_t t = 0; t < times.size(); ++t) out[t] = population(t, site);
  return out;
}

Trajectory evolve(const EigenDecomposition& ed, std::size_t source, std::span<const double> times) {
  const std::size_t n = ed.size;
  check_site(source, n, "source");
  check_times(times);

  Trajectory traj;
  traj.n_sites = n;
  traj.source = source;
  traj.times.assign(times.begin(), times.end());
  traj.amplitudes.assign(times.size() * n, Complex{});

  std::vector<double> src(n);
  for (std::size_t i = 0; i < n; ++i) src[i] = ed.component(i, source - 1);

  std::vector<Complex> phase(n);
  for (std::size_t t = 0; t < times.size(); ++t) {
    Complex* row = traj.amplitudes.data() + t * n;
    if (times[t] == 0.0) {
      row[source - 1] = 1.0;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i)
      phase[i] = src[i] * std::polar(1.0, -ed.values[i] * times[t]);
    for (std::size_t i = 0; i < n; ++i) {
      auto v = ed.vector(i);
      for (std::size_t k = 0; k < n; ++k) row[k] += v[k] * phase[i];
    }
  }
  fill_populations(traj);
  return traj;
}

Complex amplitude(const EigenDecomposition& ed, std::size_t source, std::size_t target, double t) {
  check_site(source, ed.size, "source");
  check_site(target, ed.size, "target");
  if (!std::isfinite(t)) throw std::invalid_argument("amplitude: time must be finite");
  if (t == 0.0) return source == target ? 1.0 : 0.0;
  Complex acc{};
  for (std::size_t i = 0; i < ed.size; ++i)
    acc += ed.component(i, target - 1) * ed.component(i, source - 1) *
           std::polar(1.0, -ed.values[i] * t);
  return acc;
}

Trajectory integrate_oracle(const Hamiltonian1Ex& h, std::size_t source,
                            std::span<const double> times) {
  h.validate();
  const std::size_t n = h.size();
  check_site(source, n, "source");
  check_times(times);

  double hnorm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double row = std::fabs(h.diag[k]);
    if (k > 0) row += std::fabs(h.offdiag[k - 1]);
    if (k + 1 < n) row += std::fabs(h.offdiag[k]);
    hnorm = std::max(hnorm, row);
  }
  const double max_dt = kOracleStep / hnorm;
  if (!(max_dt > 0.0) || !std::isfinite(max_dt))
    throw NumericalError("integrate_oracle: step size underflow for ||H|| = " +
                         std::to_string(hnorm));

  // dc/dt = -i H c
  auto deriv = [&](const std::vector<Complex>& c, std::vector<Complex>& out) {
    for (std::size_t k = 0; k < n; ++k) {
      Complex acc = h.diag[k] * c[k];
      if (k > 0) acc += h.offdiag[k - 1] * c[k - 1];
      if (k + 1 < n) acc += h.offdiag[k] * c[k + 1];
      out[k] = Complex{acc.imag(), -acc.real()};
    }
  };

  std::vector<Complex> c(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
  c[source - 1] = 1.0;

  auto rk4_step = [&](double dt) {
    deriv(c, k1);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = c[k] + 0.5 * dt * k1[k];
    deriv(tmp, k2);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = c[k] + 0.5 * dt * k2[k];
    deriv(tmp, k3);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = c[k] + dt * k3[k];
    deriv(tmp, k4);
    for (std::size_t k = 0; k < n; ++k)
      c[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  };

  Trajectory traj;
  traj.n_sites = n;
  traj.source = source;
  traj.times.assign(times.begin(), times.end());
  traj.amplitudes.resize(times.size() * n);

  double t_now = 0.0;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double span = times[ti] - t_now;
    if (span > 0.0) {
      const double steps = std::ceil(span / max_dt);
      if (steps > kMaxOracleSteps)
        throw NumericalError("integrate_oracle: step size underflow (" +
                             std::to_string(steps) + " steps requested)");
      const auto count = static_cast<std::size_t>(steps);
      const double dt = span / steps;
      for (std::size_t s = 0; s < count; ++s) rk4_step(dt);
      t_now = times[ti];
    }
    std::copy(c.begin(), c.end(), traj.amplitudes.begin() + static_cast<std::ptrdiff_t>(ti * n));
  }
  fill_populations(traj);
  return traj;
}

double energy_expectation(const Hamiltonian1Ex& h, std::span<const Complex> state) {
  const std::size_t n = h.size();
  double e = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    Complex hc = h.diag[k] * state[k];
    if (k > 0) hc += h.offdiag[k - 1] * state[k - 1];
    if (k + 1 < n) hc += h.offdiag[k] * state[k + 1];
    e += (std::conj(state[k]) * hc).real();
  }
  return e;
}

std::vector<double> uniform_grid(double t_max, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
  if (!(t_max >= 0.0) || !std::isfinite(t_max))
    throw std::invalid_argument("t_max must be finite and non-negative");
  const auto count = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = static_cast<double>(k) * dt;
  return grid;
}

double default_time_step(const EigenDecomposition& ed) {
  const double width = ed.values.back() - ed.values.front();
  return width > 0.0 ? 0.1 / width : 0.1;
}

PopulationStream::PopulationStream(const EigenDecomposition& ed, std::size_t source,
                                   std::size_t target, double dt)
    : dt_(dt) {
  check_site(source, ed.size, "source");
  check_site(target, ed.size, "target");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
  // Energies relative to the band center; the common phase drops out of |c|^2.
  const double center = 0.5 * (ed.values.front() + ed.values.back());
  for (std::size_t i = 0; i < ed.size; ++i) {
    const double w = ed.component(i, target - 1) * ed.component(i, source - 1);
    if (w == 0.0) continue;
    energies_.push_back(ed.values[i] - center);
    weights_.push_back(w);
  }
  const std::size_t m = energies_.size();
  re_.resize(m);
  im_.resize(m);
  step_re_.resize(m);
  step_im_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    step_re_[i] = std::cos(energies_[i] * dt_);
    step_im_[i] = -std::sin(energies_[i] * dt_);
  }
  anchor();
}

void PopulationStream::anchor() {
  const double t = time();
  for (std::size_t i = 0; i < energies_.size(); ++i) {
    re_[i] = weights_[i] * std::cos(energies_[i] * t);
    im_[i] = -weights_[i] * std::sin(energies_[i] * t);
  }
}

double PopulationStream::population() const {
  double sr = 0.0, si = 0.0;
  for (std::size_t i = 0; i < re_.size(); ++i) {
    sr += re_[i];
    si += im_[i];
  }
  return sr * sr + si * si;
}

void PopulationStream::advance() {
  ++step_;
  if (step_ % kAnchorInterval == 0) {
    anchor();
    return;
  }
  for (std::size_t i = 0; i < re_.size(); ++i) {
    const double r = re_[i] * step_re_[i] - im_[i] * step_im_[i];
    const double s = re_[i] * step_im_[i] + im_[i] * step_re_[i];
    re_[i] = r;
    im_[i] = s;
  }
}

Table trajectory_table(const Trajectory& traj, bool with_amplitudes) {
  Table table;
  table.header.push_back("t");
  for (std::size_t k = 1; k <= traj.n_sites; ++k) table.header.push_back("P_" + std::to_string(k));
  if (with_amplitudes)
    for (std::size_t k = 1; k <= traj.n_sites; ++k) {
      table.header.push_back("re_" + std::to_string(k));
      table.header.push_back("im_" + std::to_string(k));
    }
  table.rows.reserve(traj.times.size());
  for (std::size_t t = 0; t < traj.times.size(); ++t) {
    std::vector<Cell> row;
    row.emplace_back(traj.times[t]);
    for (std::size_t k = 1; k <= traj.n_sites; ++k) row.emplace_back(traj.population(t, k));
    if (with_amplitudes)
      for (std::size_t k = 1; k <= traj.n_sites; ++k) {
        row.emplace_back(traj.amplitude(t, k).real());
        row.emplace_back(traj.amplitude(t, k).imag());
      }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace qst
