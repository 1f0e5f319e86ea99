#include "qst/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qst/chain_model.hpp"
#include "qst/dynamics.hpp"
#include "qst/eigensolver.hpp"
#include "qst/errors.hpp"
#include "qst/experiments.hpp"
#include "qst/metrics.hpp"
#include "qst/table.hpp"

namespace qst::cli {

namespace {

struct KeySpec {
  const char* key;
  const char* flags;  // CLI11 option names
  const char* help;
  bool is_flag = false;
};

// Every parameter any verb understands. Config files and presets may carry
// any of these; verbs ignore keys they do not use.
const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"n_sites", "--n,--n-sites", "number of sites N"},
      {"a", "--a", "potential strength a (units of J)"},
      {"p", "--p", "potential exponent p"},
      {"j_edge", "--j-edge", "edge couplings J_1 = J_{N-1}"},
      {"j_bulk", "--j-bulk", "bulk coupling J"},
      {"fields", "--fields", "explicit fields B_1..B_N, comma separated"},
      {"couplings", "--couplings", "explicit couplings J_1..J_{N-1}, comma separated"},
      {"source", "--source", "initially excited site (1-based)"},
      {"target", "--target", "receiver site (1-based, default N)"},
      {"t_max", "--t-max", "end of the time grid (hbar/J)"},
      {"dt", "--dt", "time step (hbar/J)"},
      {"amplitudes", "--amplitudes", "also write re_k,im_k columns", true},
      {"oracle", "--oracle", "use the RK4 integrator instead of spectral propagation", true},
      {"threshold", "--threshold", "receiver population threshold for t*"},
      {"horizon", "--horizon", "time horizon for transfer-time scans"},
      {"window", "--window", "moving-average window for the smoothed t*"},
      {"floor", "--floor", "relevance floor for the smoothed t* peak"},
      {"dynamics", "--dynamics", "compute transfer times (true/false)"},
      {"max_steps", "--max-steps", "cap on time steps per dynamics scan"},
      {"axis1", "--axis1", "sweep axis, e.g. p=0:4:0.05 or j_edge=log:0.01:1:21"},
      {"axis2", "--axis2", "optional second sweep axis"},
      {"max_points", "--max-points", "grid size limit"},
      {"p_grid", "--p-grid", "p values for the spectrum scan (start:stop:step or list)"},
      {"a_grid", "--a-grid", "a values for tstar (start:stop:step or list)"},
      {"mass", "--mass", "atomic mass in kg (default Rb-87)"},
      {"omega_trap", "--omega-trap", "trap angular frequency in rad/s"},
      {"trap_frequency_hz", "--trap-frequency-hz", "trap frequency omega/2pi in Hz"},
      {"lattice_spacing", "--lattice-spacing", "lattice spacing in m"},
      {"hopping", "--hopping", "tunnelling J/hbar in 1/s"},
      {"format", "--format", "csv or jsonl"},
      {"out", "--out", "output path (default stdout)"},
      {"seed", "--seed", "reserved; no randomness is used"},
  };
  return specs;
}

const char* kUnitsComment =
    "times in units of hbar/J, energies in units of J; single-excitation hopping "
    "matrix element is 2 J_n and on-site energy 2 B_n";

double to_double(const Params& params, const std::string& key) {
  const std::string& text = params.at(key);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    throw UsageError("--" + key + ": '" + text + "' is not a finite number");
  return value;
}

double get_double(const Params& params, const std::string& key, double fallback) {
  return params.count(key) ? to_double(params, key) : fallback;
}

std::optional<double> get_optional(const Params& params, const std::string& key) {
  if (!params.count(key)) return std::nullopt;
  return to_double(params, key);
}

std::size_t get_size(const Params& params, const std::string& key, std::size_t fallback) {
  if (!params.count(key)) return fallback;
  const double v = to_double(params, key);
  if (v < 0 || v != std::floor(v) || v > 1e15)
    throw UsageError("--" + key + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool get_bool(const Params& params, const std::string& key, bool fallback) {
  if (!params.count(key)) return fallback;
  const std::string& v = params.at(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError("--" + key + ": expected true or false, got '" + v + "'");
}

std::vector<double> get_list(const Params& params, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(params.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    Params tmp{{key, item}};
    out.push_back(to_double(tmp, key));
  }
  return out;
}

// Accepts "a=0:1:0.1", "0:1:0.1" or "0.3,0.5".
std::vector<double> get_grid(const Params& params, const std::string& key, const std::string& axis) {
  std::string spec = params.at(key);
  if (spec.find('=') == std::string::npos) spec = axis + "=" + spec;
  try {
    auto parsed = parse_axis(spec);
    if (parsed.name != axis) throw UsageError("--" + key + " must be an axis over " + axis);
    return parsed.values;
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError("--" + key + ": " + e.what());
  }
}

ChainConfig chain_config(const Params& params) {
  ChainConfig cfg;
  cfg.n_sites = get_size(params, "n_sites", cfg.n_sites);
  cfg.a = get_double(params, "a", cfg.a);
  cfg.p = get_double(params, "p", cfg.p);
  cfg.j_edge = get_double(params, "j_edge", cfg.j_edge);
  cfg.j_bulk = get_double(params, "j_bulk", cfg.j_bulk);
  if (params.count("fields")) {
    cfg.fields = get_list(params, "fields");
    if (!params.count("n_sites")) cfg.n_sites = cfg.fields->size();
  }
  if (params.count("couplings")) {
    cfg.couplings = get_list(params, "couplings");
    if (!params.count("n_sites") && !cfg.fields) cfg.n_sites = cfg.couplings->size() + 1;
  }
  return cfg;
}

ReportOptions report_options(const Params& params) {
  ReportOptions opts;
  opts.threshold = get_double(params, "threshold", opts.threshold);
  opts.horizon = get_optional(params, "horizon");
  opts.window = get_optional(params, "window");
  opts.dt = get_optional(params, "dt");
  opts.relevance_floor = get_double(params, "floor", opts.relevance_floor);
  opts.dynamics = get_bool(params, "dynamics", opts.dynamics);
  opts.max_steps = get_size(params, "max_steps", opts.max_steps);
  return opts;
}

unsigned sweep_threads() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QST_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
      throw UsageError("QST_THREADS must be a positive integer");
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
  }
  return threads;
}

void emit(const Params& params, Table table, std::ostream& out) {
  const auto format = parse_table_format(params.count("format") ? params.at("format") : "csv");
  table.comments.insert(table.comments.begin(), kUnitsComment);
  if (params.count("out") && params.at("out") != "-") {
    write_table(params.at("out"), table, format);
  } else {
    write_table(out, table, format);
  }
}

void run_fields(const Params& params, std::ostream& out) {
  const ChainSpec chain = chain_config(params).to_chain();
  Table table;
  table.header = {"site", "field", "coupling_next"};
  for (std::size_t k = 0; k < chain.n_sites; ++k) {
    table.rows.push_back({Cell{static_cast<std::int64_t>(k + 1)}, Cell{chain.fields[k]},
                          k + 1 < chain.n_sites ? Cell{chain.couplings[k]} : Cell{}});
  }
  emit(params, std::move(table), out);
}

void run_spectrum(const Params& params, std::ostream& out) {
  const ChainConfig cfg = chain_config(params);
  std::optional<std::vector<double>> p_grid;
  if (params.count("p_grid")) {
    p_grid = get_grid(params, "p_grid", "p");
  } else if (params.count("axis1") && params.at("axis1").rfind("p=", 0) == 0) {
    p_grid = get_grid(params, "axis1", "p");
  }
  if (p_grid) {
    emit(params, scan_spectrum_vs_p(cfg.n_sites, cfg.a, cfg.j_edge, cfg.j_bulk, *p_grid), out);
    return;
  }
  const auto ed = decompose(to_single_excitation(cfg.to_chain()));
  emit(params, eigen_table(ed), out);
}

void run_evolve(const Params& params, std::ostream& out) {
  const ChainConfig cfg = chain_config(params);
  const Hamiltonian1Ex h = to_single_excitation(cfg.to_chain());
  const auto ed = decompose(h);
  const std::size_t source = get_size(params, "source", 1);
  const double t_max = get_double(params, "t_max", 50.0);
  const double dt = get_double(params, "dt", default_time_step(ed));
  if (!(dt > 0.0)) throw UsageError("--dt must be positive");
  if (t_max / dt > 2e7) throw UsageError("time grid too long (t_max/dt > 2e7); raise --dt");
  const auto grid = uniform_grid(t_max, dt);
  const Trajectory traj =
      get_bool(params, "oracle", false) ? integrate_oracle(h, source, grid) : evolve(ed, source, grid);
  emit(params, trajectory_table(traj, get_bool(params, "amplitudes", false)), out);
}

void run_report(const Params& params, std::ostream& out) {
  const ChainConfig cfg = chain_config(params);
  const TransferReport report = evaluate_point(cfg, report_options(params));
  Table table;
  table.header = report_header();
  table.rows.push_back(report_row(cfg.context(), report));
  table.comments.push_back(std::string("ambiguous=") + (report.ambiguous ? "true" : "false") +
                           " degenerate=" + (report.degenerate ? "true" : "false") +
                           " truncated=" + (report.truncated ? "true" : "false"));
  emit(params, std::move(table), out);
}

void run_sweep_verb(const Params& params, std::ostream& out) {
  if (!params.count("axis1")) throw UsageError("sweep needs --axis1 (or a --preset)");
  SweepGrid grid;
  try {
    grid.axis1 = parse_axis(params.at("axis1"));
    if (params.count("axis2")) grid.axis2 = parse_axis(params.at("axis2"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  grid.base = chain_config(params);
  grid.options = report_options(params);
  grid.max_points = get_size(params, "max_points", grid.max_points);
  emit(params, sweep_table(run_sweep(grid, sweep_threads())), out);
}

void run_tstar(const Params& params, std::ostream& out) {
  const ChainConfig cfg = chain_config(params);
  if (!params.count("a_grid")) throw UsageError("tstar needs --a-grid (or --preset fig6)");
  const auto a_grid = get_grid(params, "a_grid", "a");
  const auto rows = compare_tstar(cfg.n_sites, cfg.p, cfg.j_edge, cfg.j_bulk, a_grid,
                                  report_options(params));
  emit(params, tstar_table(rows), out);
}

void run_exp_ratio(const Params& params, std::ostream& out) {
  LatticeParams lp;
  lp.mass = get_double(params, "mass", constants::rb87_mass);
  if (params.count("omega_trap") && params.count("trap_frequency_hz"))
    throw UsageError("give either --omega-trap or --trap-frequency-hz, not both");
  lp.trap_angular_frequency = params.count("omega_trap")
                                  ? to_double(params, "omega_trap")
                                  : 2.0 * std::numbers::pi * get_double(params, "trap_frequency_hz", 103.0);
  lp.lattice_spacing = get_double(params, "lattice_spacing", 532e-9);
  lp.hopping_over_hbar = get_double(params, "hopping", 940.0);
  const double ratio = experimental_ratio(lp);
  Table table;
  table.header = {"mass", "omega_trap", "lattice_spacing", "hopping", "ratio"};
  table.rows.push_back({Cell{lp.mass}, Cell{lp.trap_angular_frequency}, Cell{lp.lattice_spacing},
                        Cell{lp.hopping_over_hbar}, Cell{ratio}});
  emit(params, std::move(table), out);
}

std::string json_scalar_to_string(const std::string& key, const nlohmann::json& value) {
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_integer() || value.is_number_unsigned()) return value.dump();
  if (value.is_number_float()) return format_number(value.get<double>());
  if (value.is_string()) return value.get<std::string>();
  throw UsageError("config key '" + key + "' has an unsupported value type");
}

}  // namespace

const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {"fields", "spectrum", "evolve", "report",
                                             "sweep",  "tstar",    "exp-ratio"};
  return v;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : key_specs()) k.emplace_back(s.key);
    return k;
  }();
  return keys;
}

// Grid resolutions are not part of the figures' published parameters; the
// values below are this project's choices.
const std::map<std::string, Params>& presets() {
  static const std::map<std::string, Params> table = {
      {"fig2",
       {{"n_sites", "8"},
        {"a", "0.5"},
        {"j_bulk", "1"},
        {"axis1", "p=0:4:0.05"},
        {"axis2", "j_edge=log:0.01:1:21"},
        {"dynamics", "false"}}},
      {"fig3",
       {{"n_sites", "8"},
        {"j_edge", "1"},
        {"j_bulk", "1"},
        {"axis1", "p=0:4:0.05"},
        {"axis2", "a=0:2:0.05"},
        {"dynamics", "false"}}},
      {"fig4",
       {{"n_sites", "12"},
        {"a", "0.5"},
        {"j_edge", "0.01"},
        {"j_bulk", "1"},
        {"axis1", "p=0:4:0.05"},
        {"p_grid", "0:4:0.01"},
        {"dynamics", "true"},
        {"max_steps", "50000000"}}},
      {"fig5",
       {{"n_sites", "8"},
        {"a", "0.5"},
        {"p", "2"},
        {"j_edge", "1"},
        {"j_bulk", "1"},
        {"source", "1"},
        {"t_max", "20000"},
        {"dt", "0.1"}}},
      {"fig6",
       {{"n_sites", "8"},
        {"p", "2"},
        {"j_edge", "1"},
        {"j_bulk", "1"},
        {"a_grid", "a=0.05:1:0.05"},
        {"threshold", "0.95"}}},
  };
  return table;
}

Params parse_config_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  const auto& keys = known_keys();
  Params params;
  for (const auto& [key, value] : doc.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw UsageError("unknown config key '" + key + "'");
    if (value.is_array()) {
      std::string joined;
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) throw UsageError("config key '" + key + "' must hold numbers");
        if (i) joined += ',';
        joined += json_scalar_to_string(key, value[i]);
      }
      params[key] = joined;
    } else {
      params[key] = json_scalar_to_string(key, value);
    }
  }
  return params;
}

Params load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

std::string dump_config_json(const Params& params) {
  auto as_number = [](const std::string& s) -> std::optional<nlohmann::json> {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    if (s.find_first_of(".eE") == std::string::npos && std::fabs(v) < 9e15)
      return nlohmann::json(static_cast<std::int64_t>(v));
    return nlohmann::json(v);
  };
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [key, value] : params) {
    if (key == "fields" || key == "couplings") {
      nlohmann::json arr = nlohmann::json::array();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto num = as_number(item);
        if (!num) throw UsageError("'" + key + "' must be a list of numbers");
        arr.push_back(*num);
      }
      doc[key] = arr;
    } else if (value == "true" || value == "false") {
      doc[key] = value == "true";
    } else if (auto num = as_number(value);
               num && (num->is_number_integer() ? num->dump() == value
                                                : format_number(num->get<double>()) == value)) {
      doc[key] = *num;
    } else {
      doc[key] = value;
    }
  }
  return doc.dump(2) + "\n";
}

Command parse_command(const std::vector<std::string>& args) {
  CLI::App app{"Quantum state transfer in XX chains with power-law on-site potentials", "qst"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "show help for every verb");

  struct Bound {
    std::string key;
    CLI::Option* option;
  };
  std::map<std::string, std::vector<Bound>> bound;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flag_values;
  std::string config_path, preset_name;
  bool dump = false;

  const std::map<std::string, const char*> descriptions = {
      {"fields", "print the on-site fields and couplings of a chain"},
      {"spectrum", "eigenvalues/eigenvectors, or the spectrum versus p with --p-grid"},
      {"evolve", "population dynamics from a source site"},
      {"report", "QST drop, dimer modes and transfer times for one chain"},
      {"sweep", "transfer reports over a one- or two-axis parameter grid"},
      {"tstar", "threshold t* versus pi/|E+ - E-| over a grid of a"},
      {"exp-ratio", "V_ext / J for optical-lattice parameters"},
  };

  for (const auto& verb : verbs()) {
    CLI::App* sub = app.add_subcommand(verb, descriptions.at(verb));
    sub->add_option("--config", config_path, "JSON config with default parameters");
    sub->add_option("--preset", preset_name, "figure preset (fig2..fig6)");
    sub->add_flag("--dump-config", dump, "print the merged parameters as JSON and exit");
    for (const auto& spec : key_specs()) {
      CLI::Option* opt = nullptr;
      if (spec.is_flag)
        opt = sub->add_flag(spec.flags, flag_values[spec.key], spec.help);
      else
        opt = sub->add_option(spec.flags, values[spec.key], spec.help);
      bound[verb].push_back({spec.key, opt});
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  Command cmd;
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    cmd.help = true;
    cmd.help_text = app.help();
    for (auto* sub : app.get_subcommands()) cmd.help_text = sub->help();
    return cmd;
  } catch (const CLI::CallForAllHelp&) {
    cmd.help = true;
    cmd.help_text = app.help("", CLI::AppFormatMode::All);
    return cmd;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* chosen = app.get_subcommands().front();
  cmd.verb = chosen->get_name();
  cmd.dump_config = dump;

  if (!preset_name.empty()) {
    const auto it = presets().find(preset_name);
    if (it == presets().end()) throw UsageError("unknown preset '" + preset_name + "'");
    cmd.params = it->second;
  }
  if (!config_path.empty())
    for (auto& [k, v] : load_config(config_path)) cmd.params[k] = v;
  for (const auto& b : bound[cmd.verb]) {
    if (b.option->count() == 0) continue;
    const auto spec = std::find_if(key_specs().begin(), key_specs().end(),
                                   [&](const KeySpec& s) { return b.key == s.key; });
    cmd.params[b.key] = spec->is_flag ? (flag_values[b.key] ? "true" : "false") : values[b.key];
  }
  return cmd;
}

void run_command(const Command& cmd, std::ostream& out) {
  if (cmd.dump_config) {
    out << dump_config_json(cmd.params);
    return;
  }
  const auto& p = cmd.params;
  if (cmd.verb == "fields") return run_fields(p, out);
  if (cmd.verb == "spectrum") return run_spectrum(p, out);
  if (cmd.verb == "evolve") return run_evolve(p, out);
  if (cmd.verb == "report") return run_report(p, out);
  if (cmd.verb == "sweep") return run_sweep_verb(p, out);
  if (cmd.verb == "tstar") return run_tstar(p, out);
  if (cmd.verb == "exp-ratio") return run_exp_ratio(p, out);
  throw UsageError("unknown verb '" + cmd.verb + "'");
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const Command cmd = parse_command(args);
    if (cmd.help) {
      out << cmd.help_text;
      return kExitOk;
    }
    run_command(cmd, out);
    return kExitOk;
  } catch (const NumericalError& e) {
    err << "qst: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "qst: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qst: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qst::cli
