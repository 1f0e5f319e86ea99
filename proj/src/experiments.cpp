#include "qst/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qst/eigensolver.hpp"
#include "qst/errors.hpp"

namespace qst {

namespace {

const std::vector<std::string> kAxisNames = {"n_sites", "a", "p", "j_edge", "j_bulk"};

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument(context + ": '" + text + "' is not a number");
  return value;
}

// Rounds generated grid values to 12 significant digits so 0.05 * 3 reads 0.15.
double snap(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 12);
  double out = x;
  std::from_chars(buf, res.ptr, out);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

void apply_axis(ChainConfig& cfg, const std::string& name, double value) {
  if (name == "n_sites") {
    if (value < 2 || value != std::floor(value))
      throw std::invalid_argument("axis n_sites needs integer values >= 2");
    cfg.n_sites = static_cast<std::size_t>(value);
    cfg.fields.reset();
    cfg.couplings.reset();
  } else if (name == "a") {
    cfg.a = value;
    cfg.fields.reset();
  } else if (name == "p") {
    cfg.p = value;
    cfg.fields.reset();
  } else if (name == "j_edge") {
    cfg.j_edge = value;
    cfg.couplings.reset();
  } else if (name == "j_bulk") {
    cfg.j_bulk = value;
    cfg.couplings.reset();
  } else {
    throw std::invalid_argument("unknown sweep axis '" + name + "'");
  }
}

}  // namespace

ChainSpec ChainConfig::to_chain() const {
  std::vector<double> b = fields ? *fields : build_fields(n_sites, PotentialSpec{a, p});
  if (b.size() != n_sites)
    throw std::invalid_argument("explicit fields must have n_sites entries");
  if (couplings) {
    ChainSpec chain{n_sites, *couplings, std::move(b)};
    chain.validate();
    return chain;
  }
  return build_chain(n_sites, j_edge, j_bulk, std::move(b));
}

ReportContext ChainConfig::context() const {
  ReportContext ctx;
  ctx.n_sites = n_sites;
  if (!fields) {
    ctx.a = a;
    ctx.p = p;
  }
  if (!couplings) {
    ctx.j_edge = j_edge;
    ctx.j_bulk = j_bulk;
  }
  return ctx;
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("axis '" + spec + "' must look like name=values");
  SweepAxis axis;
  axis.name = spec.substr(0, eq);
  std::replace(axis.name.begin(), axis.name.end(), '-', '_');
  if (std::find(kAxisNames.begin(), kAxisNames.end(), axis.name) == kAxisNames.end())
    throw std::invalid_argument("unknown sweep axis '" + axis.name + "'");
  const std::string body = spec.substr(eq + 1);
  const std::string ctx = "axis " + axis.name;

  auto parts = split(body, ':');
  if (parts.size() == 4 && parts[0] == "log") {
    const double start = parse_double(parts[1], ctx);
    const double stop = parse_double(parts[2], ctx);
    const double count = parse_double(parts[3], ctx);
    if (!(start > 0.0 && stop > start) || count < 2 || count != std::floor(count))
      throw std::invalid_argument(ctx + ": log axis needs 0 < start < stop and count >= 2");
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < n; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
      axis.values.push_back(snap(start * std::pow(stop / start, frac)));
    }
  } else if (parts.size() == 3) {
    const double start = parse_double(parts[0], ctx);
    const double stop = parse_double(parts[1], ctx);
    const double step = parse_double(parts[2], ctx);
    if (!(step > 0.0) || stop < start)
      throw std::invalid_argument(ctx + ": range needs step > 0 and stop >= start");
    const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
    if (count > 1e7) throw std::invalid_argument(ctx + ": too many points");
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i)
      axis.values.push_back(snap(start + static_cast<double>(i) * step));
  } else if (parts.size() == 1) {
    for (const auto& item : split(body, ',')) axis.values.push_back(parse_double(item, ctx));
  } else {
    throw std::invalid_argument(ctx + ": cannot parse '" + body + "'");
  }
  return axis;
}

void SweepGrid::validate() const {
  auto check = [](const SweepAxis& axis) {
    if (axis.values.empty()) throw std::invalid_argument("sweep axis '" + axis.name + "' is empty");
    for (std::size_t i = 0; i < axis.values.size(); ++i) {
      if (!std::isfinite(axis.values[i]))
        throw std::invalid_argument("sweep axis '" + axis.name + "' has a non-finite value");
      if (i > 0 && !(axis.values[i] > axis.values[i - 1]))
        throw std::invalid_argument("sweep axis '" + axis.name + "' must be ascending");
    }
  };
  check(axis1);
  if (axis2) {
    check(*axis2);
    if (axis2->name == axis1.name) throw std::invalid_argument("sweep axes must differ");
  }
  if (size() > max_points)
    throw std::invalid_argument("sweep grid has " + std::to_string(size()) +
                                " points, limit is " + std::to_string(max_points));
}

std::size_t SweepGrid::size() const {
  return axis1.values.size() * (axis2 ? axis2->values.size() : 1);
}

ChainConfig SweepGrid::point(std::size_t index) const {
  const std::size_t inner = axis2 ? axis2->values.size() : 1;
  ChainConfig cfg = base;
  apply_axis(cfg, axis1.name, axis1.values[index / inner]);
  if (axis2) apply_axis(cfg, axis2->name, axis2->values[index % inner]);
  return cfg;
}

TransferReport evaluate_point(const ChainConfig& config, const ReportOptions& options) {
  const Hamiltonian1Ex h = to_single_excitation(config.to_chain());
  return make_report(decompose(h), options);
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, unsigned threads) {
  grid.validate();
  const std::size_t total = grid.size();
  std::vector<SweepRow> rows(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      SweepRow& row = rows[i];
      row.config = grid.point(i);
      try {
        row.report = evaluate_point(row.config, grid.options);
        if (row.report.truncated) row.status = "truncated";
      } catch (const NumericalError& e) {
        row.status = std::string("numerical_error: ") + e.what();
      } catch (const std::invalid_argument& e) {
        row.status = std::string("invalid: ") + e.what();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  return rows;
}

Table sweep_table(const std::vector<SweepRow>& rows) {
  Table table;
  table.header = report_header();
  table.header.push_back("status");
  for (const auto& row : rows) {
    auto cells = report_row(row.config.context(), row.report);
    if (row.status.rfind("numerical_error", 0) == 0 || row.status.rfind("invalid", 0) == 0)
      std::fill(cells.begin() + 5, cells.end(), Cell{});
    cells.emplace_back(row.status);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

Table scan_spectrum_vs_p(std::size_t n_sites, double a, double j_edge, double j_bulk,
                         const std::vector<double>& p_grid) {
  Table table;
  table.header.push_back("p");
  for (std::size_t k = 1; k <= n_sites; ++k) table.header.push_back("lambda_" + std::to_string(k));
  table.header.push_back("index_plus");
  table.header.push_back("index_minus");
  for (double p : p_grid) {
    const auto chain = build_chain(n_sites, j_edge, j_bulk, build_fields(n_sites, {a, p}));
    const auto ed = decompose(to_single_excitation(chain));
    const auto modes = identify_dimer_modes(ed);
    std::vector<Cell> row{Cell{p}};
    for (double v : ed.values) row.emplace_back(v);
    row.emplace_back(static_cast<std::int64_t>(modes.index_plus + 1));
    row.emplace_back(static_cast<std::int64_t>(modes.index_minus + 1));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<TstarRow> compare_tstar(std::size_t n_sites, double p, double j_edge, double j_bulk,
                                    const std::vector<double>& a_grid,
                                    const ReportOptions& options) {
  ReportOptions opts = options;
  opts.dynamics = true;
  opts.threshold_only = true;
  std::vector<TstarRow> rows;
  for (double a : a_grid) {
    ChainConfig cfg;
    cfg.n_sites = n_sites;
    cfg.a = a;
    cfg.p = p;
    cfg.j_edge = j_edge;
    cfg.j_bulk = j_bulk;
    const auto report = evaluate_point(cfg, opts);
    rows.push_back({a, report.t_threshold, report.t_est});
  }
  return rows;
}

Table tstar_table(const std::vector<TstarRow>& rows) {
  Table table;
  table.header = {"a", "t_thr", "t_est"};
  for (const auto& r : rows)
    table.rows.push_back({Cell{r.a}, optional_cell(r.t_threshold), optional_cell(r.t_est)});
  return table;
}

double experimental_ratio(const LatticeParams& params) {
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(params.mass) || !positive(params.lattice_spacing) ||
      !positive(params.hopping_over_hbar))
    throw std::invalid_argument("experimental_ratio: mass, lattice spacing and hopping must be positive");
  if (!(params.trap_angular_frequency >= 0.0) || !std::isfinite(params.trap_angular_frequency))
    throw std::invalid_argument("experimental_ratio: trap frequency must be non-negative");
  const double omega = params.trap_angular_frequency;
  const double v_ext = 0.5 * params.mass * omega * omega * params.lattice_spacing * params.lattice_spacing;
  return v_ext / (constants::hbar * params.hopping_over_hbar);
}

}  // namespace qst
