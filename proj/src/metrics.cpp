#include "qst/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qst/errors.hpp"

namespace qst {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr std::size_t kResumInterval = 1 << 20;

// Bisection on P(t) - threshold between a grid point below and one above.
double refine_crossing(const EigenDecomposition& ed, std::size_t source, std::size_t target,
                       double threshold, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::norm(amplitude(ed, source, target, mid)) >= threshold)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("threshold must lie in (0, 1)");
}

}  // namespace

double qst_drop(const EigenDecomposition& ed, std::size_t site) {
  if (ed.size < 2) throw std::invalid_argument("qst_drop: need at least 2 sites");
  if (site < 1 || site > ed.size) throw std::invalid_argument("qst_drop: site out of range");
  double best = 0.0;
  for (std::size_t i = 0; i < ed.size; ++i)
    best = std::max(best, std::fabs(ed.component(i, site - 1)));
  return best - kInvSqrt2;
}

DimerModes identify_dimer_modes(const EigenDecomposition& ed) {
  const std::size_t n = ed.size;
  if (n < 2) throw std::invalid_argument("identify_dimer_modes: need at least 2 sites");

  std::vector<double> ov_plus(n), ov_minus(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double first = ed.component(i, 0);
    const double last = ed.component(i, n - 1);
    ov_plus[i] = std::fabs(first + last) * kInvSqrt2;
    ov_minus[i] = std::fabs(first - last) * kInvSqrt2;
  }
  auto argmax = [](const std::vector<double>& v, auto&& allowed) {
    std::size_t best = v.size();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (allowed(i) && (best == v.size() || v[i] > v[best])) best = i;
    return best;
  };
  auto any = [](std::size_t) { return true; };

  DimerModes modes;
  modes.index_plus = argmax(ov_plus, any);
  modes.index_minus = argmax(ov_minus, any);
  if (modes.index_plus == modes.index_minus) {
    modes.degenerate = true;
    const bool labelled = !ed.parity.empty();
    if (labelled) {
      modes.index_plus = argmax(ov_plus, [&](std::size_t i) { return ed.parity[i] == Parity::even; });
      modes.index_minus = argmax(ov_minus, [&](std::size_t i) { return ed.parity[i] == Parity::odd; });
    }
    if (!labelled || modes.index_plus == n || modes.index_minus == n ||
        modes.index_plus == modes.index_minus) {
      const std::size_t shared = argmax(ov_plus, any);
      if (ov_plus[shared] >= ov_minus[shared]) {
        modes.index_plus = shared;
        modes.index_minus = argmax(ov_minus, [&](std::size_t i) { return i != shared; });
      } else {
        modes.index_minus = shared;
        modes.index_plus = argmax(ov_plus, [&](std::size_t i) { return i != shared; });
      }
    }
  }
  modes.e_plus = ed.values[modes.index_plus];
  modes.e_minus = ed.values[modes.index_minus];
  modes.overlap_plus = ov_plus[modes.index_plus];
  modes.overlap_minus = ov_minus[modes.index_minus];
  modes.ambiguous = modes.overlap_plus < kInvSqrt2 && modes.overlap_minus < kInvSqrt2;
  return modes;
}

std::optional<double> t_star_estimate(double e_plus, double e_minus) {
  const double split = std::fabs(e_plus - e_minus);
  if (!(split > 0.0)) return std::nullopt;
  return std::numbers::pi / split;
}

std::optional<double> t_star_threshold(const Trajectory& traj, const EigenDecomposition& ed,
                                       std::size_t target, double threshold, double horizon) {
  check_threshold(threshold);
  if (!(horizon > 0.0)) throw std::invalid_argument("t_star_threshold: horizon must be positive");
  if (traj.times.empty() || traj.times.back() < horizon * (1.0 - 1e-12))
    throw std::invalid_argument("t_star_threshold: trajectory does not cover the horizon");
  if (ed.size != traj.n_sites)
    throw std::invalid_argument("t_star_threshold: decomposition does not match trajectory");
  if (target < 1 || target > traj.n_sites)
    throw std::invalid_argument("t_star_threshold: target out of range");

  for (std::size_t k = 0; k < traj.times.size() && traj.times[k] <= horizon; ++k) {
    if (traj.population(k, target) >= threshold) {
      if (k == 0) return traj.times[0];
      return refine_crossing(ed, traj.source, target, threshold, traj.times[k - 1], traj.times[k]);
    }
  }
  return std::nullopt;
}

SmoothedPeakFinder::SmoothedPeakFinder(std::size_t half_width, double floor)
    : half_width_(half_width), floor_(floor), ring_(2 * half_width + 1, 0.0) {}

bool SmoothedPeakFinder::push(double sample) {
  if (peak_) return true;
  const std::size_t width = ring_.size();
  const std::size_t slot = count_ % width;
  if (count_ >= width) sum_ -= ring_[slot];
  ring_[slot] = sample;
  sum_ += sample;
  ++count_;
  if (count_ % kResumInterval == 0) {
    sum_ = 0.0;
    for (std::size_t i = 0; i < std::min(count_, width); ++i) sum_ += ring_[i];
  }
  if (count_ > half_width_) {
    const std::size_t len = std::min(count_, width);
    emit(sum_ / static_cast<double>(len));
  }
  return peak_.has_value();
}

void SmoothedPeakFinder::finish() {
  const std::size_t width = ring_.size();
  while (!peak_ && emitted_ < count_) {
    const std::size_t center = emitted_;
    const std::size_t lo = center >= half_width_ ? center - half_width_ : 0;
    double s = 0.0;
    for (std::size_t i = lo; i < count_; ++i) s += ring_[i % width];
    emit(s / static_cast<double>(count_ - lo));
  }
}

void SmoothedPeakFinder::emit(double smoothed) {
  const std::size_t idx = emitted_++;
  if (!peak_ && idx >= 2 && prev1_ > floor_ && prev1_ >= prev2_ && prev1_ > smoothed) {
    const double curvature = prev2_ - 2.0 * prev1_ + smoothed;
    double offset = 0.0;
    if (curvature < 0.0) offset = 0.5 * (prev2_ - smoothed) / curvature;
    peak_ = static_cast<double>(idx - 1) + std::clamp(offset, -0.5, 0.5);
  }
  prev2_ = prev1_;
  prev1_ = smoothed;
}

std::optional<double> smoothed_first_peak(std::span<const double> times,
                                          std::span<const double> signal, double window,
                                          double floor) {
  if (times.size() != signal.size())
    throw std::invalid_argument("smoothed_first_peak: times and signal differ in length");
  if (!(window > 0.0)) throw std::invalid_argument("smoothing window must be positive");
  if (times.size() < 3) throw std::invalid_argument("smoothed_first_peak: need at least 3 samples");
  const double span = times.back() - times.front();
  if (window > span) throw std::invalid_argument("smoothing window larger than trajectory span");
  const double dt = times[1] - times[0];
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::fabs((times[k] - times[k - 1]) - dt) > 1e-6 * dt)
      throw std::invalid_argument("smoothed_first_peak: time grid must be uniform");
  if (dt > window / 10.0 * (1.0 + 1e-12))
    throw std::invalid_argument("smoothed_first_peak: grid spacing must be <= window/10");

  const auto half = static_cast<std::size_t>(std::lround(window / (2.0 * dt)));
  SmoothedPeakFinder finder(half, floor);
  for (double x : signal)
    if (finder.push(x)) break;
  finder.finish();
  if (!finder.peak()) return std::nullopt;
  return times.front() + *finder.peak() * dt;
}

std::optional<double> t_star_smoothed(const Trajectory& traj, std::size_t target, double window,
                                      double floor) {
  const auto series = traj.population_series(target);
  return smoothed_first_peak(traj.times, series, window, floor);
}

double p_threshold(std::size_t n_sites, double a, double j,
                   std::pair<std::size_t, std::size_t> site_pair) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("p_threshold: a must be positive");
  if (!std::isfinite(j) || j == 0.0) throw std::invalid_argument("p_threshold: j must be nonzero");
  const auto [m, m1] = site_pair;
  if (m1 != m + 1 || m < 1 || m1 > n_sites / 2)
    throw std::invalid_argument("p_threshold: site pair must be (m, m+1) within 1.." +
                                std::to_string(n_sites / 2));
  const double center = 0.5 * static_cast<double>(n_sites + 1);
  const double d_outer = std::fabs(static_cast<double>(m) - center);
  const double d_inner = std::fabs(static_cast<double>(m1) - center);
  const double target = j * j;
  auto residual = [&](double p) {
    return a * (std::pow(d_outer, p) - std::pow(d_inner, p)) - target;
  };

  double lo = 0.0, hi = 64.0;
  if (!(residual(lo) < 0.0 && residual(hi) > 0.0))
    throw NumericalError("p_threshold: no root for p in [0, 64]");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double default_horizon(const DimerModes& modes, const std::optional<double>& t_est) {
  if (!modes.ambiguous && t_est) return 20.0 * *t_est;
  return 200.0;
}

double default_window(const EigenDecomposition& ed) {
  const double width = ed.values.back() - ed.values.front();
  return 3.0 * 2.0 * std::numbers::pi / width;
}

TransferReport make_report(const EigenDecomposition& ed, const ReportOptions& opts) {
  check_threshold(opts.threshold);
  TransferReport report;
  report.drop = qst_drop(ed);
  const DimerModes modes = identify_dimer_modes(ed);
  report.e_plus = modes.e_plus;
  report.e_minus = modes.e_minus;
  report.overlap_plus = modes.overlap_plus;
  report.overlap_minus = modes.overlap_minus;
  report.ambiguous = modes.ambiguous;
  report.degenerate = modes.degenerate;
  if (!modes.ambiguous) report.t_est = t_star_estimate(modes.e_plus, modes.e_minus);
  if (!opts.dynamics) return report;

  const std::size_t n = ed.size;
  const double dt = opts.dt.value_or(default_time_step(ed));
  const double horizon = opts.horizon.value_or(default_horizon(modes, report.t_est));
  const double window = opts.window.value_or(default_window(ed));
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("report horizon must be positive and finite");
  if (!(dt > 0.0)) throw std::invalid_argument("report time step must be positive");

  auto steps = static_cast<std::size_t>(std::floor(horizon / dt));
  if (steps > opts.max_steps) {
    steps = opts.max_steps;
    report.truncated = true;
  }

  const bool smoothing = !opts.threshold_only && window <= horizon && dt <= window / 10.0;
  std::optional<SmoothedPeakFinder> finder;
  if (smoothing)
    finder.emplace(static_cast<std::size_t>(std::lround(window / (2.0 * dt))), opts.relevance_floor);

  PopulationStream stream(ed, 1, n, dt);
  double p_max = 0.0;
  double prev_time = 0.0;
  for (std::size_t k = 0; k <= steps; ++k, stream.advance()) {
    const double pop = stream.population();
    p_max = std::max(p_max, pop);
    if (!report.t_threshold && pop >= opts.threshold) {
      report.t_threshold = k == 0 ? 0.0
                                  : refine_crossing(ed, 1, n, opts.threshold, prev_time, stream.time());
      if (opts.threshold_only) break;
    }
    if (finder) finder->push(pop);
    prev_time = stream.time();
  }
  if (finder) {
    finder->finish();
    if (finder->peak()) report.t_smoothed = *finder->peak() * dt;
  }
  if (!opts.threshold_only) report.p_max = p_max;
  return report;
}

std::vector<std::string> report_header() {
  return {"N",      "a",      "p",      "j_edge", "j_bulk", "F",     "E_plus",
          "E_minus", "ov_plus", "ov_minus", "t_est", "t_thr", "t_sm", "p_max"};
}

std::vector<Cell> report_row(const ReportContext& ctx, const TransferReport& r) {
  return {Cell{static_cast<std::int64_t>(ctx.n_sites)},
          optional_cell(ctx.a),
          optional_cell(ctx.p),
          optional_cell(ctx.j_edge),
          optional_cell(ctx.j_bulk),
          Cell{r.drop},
          Cell{r.e_plus},
          Cell{r.e_minus},
          Cell{r.overlap_plus},
          Cell{r.overlap_minus},
          optional_cell(r.t_est),
          optional_cell(r.t_threshold),
          optional_cell(r.t_smoothed),
          optional_cell(r.p_max)};
}

}  // namespace qst
