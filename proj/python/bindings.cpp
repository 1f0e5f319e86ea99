#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qst/chain_model.hpp"
#include "qst/cli.hpp"
#include "qst/dynamics.hpp"
#include "qst/eigensolver.hpp"
#include "qst/errors.hpp"
#include "qst/experiments.hpp"
#include "qst/metrics.hpp"

namespace py = pybind11;
using namespace qst;

namespace {

py::array_t<double> matrix(const std::vector<double>& data, std::size_t rows, std::size_t cols) {
  py::array_t<double> out({rows, cols});
  std::copy(data.begin(), data.end(), out.mutable_data());
  return out;
}

py::object optional_float(const std::optional<double>& v) {
  return v ? py::object(py::float_(*v)) : py::none();
}

py::dict report_dict(const TransferReport& r) {
  py::dict d;
  d["F"] = r.drop;
  d["E_plus"] = r.e_plus;
  d["E_minus"] = r.e_minus;
  d["ov_plus"] = r.overlap_plus;
  d["ov_minus"] = r.overlap_minus;
  d["t_est"] = optional_float(r.t_est);
  d["t_thr"] = optional_float(r.t_threshold);
  d["t_sm"] = optional_float(r.t_smoothed);
  d["p_max"] = optional_float(r.p_max);
  d["ambiguous"] = r.ambiguous;
  d["degenerate"] = r.degenerate;
  d["truncated"] = r.truncated;
  return d;
}

ReportOptions report_options(double threshold, std::optional<double> horizon,
                             std::optional<double> window, std::optional<double> dt, double floor,
                             bool dynamics, std::size_t max_steps) {
  ReportOptions o;
  o.threshold = threshold;
  o.horizon = horizon;
  o.window = window;
  o.dt = dt;
  o.relevance_floor = floor;
  o.dynamics = dynamics;
  o.max_steps = max_steps;
  return o;
}

py::dict trajectory_dict(const Trajectory& traj) {
  const std::size_t rows = traj.times.size(), n = traj.n_sites;
  py::array_t<std::complex<double>> amps({rows, n});
  std::copy(traj.amplitudes.begin(), traj.amplitudes.end(), amps.mutable_data());
  py::dict d;
  d["times"] = py::array_t<double>(rows, traj.times.data());
  d["amplitudes"] = amps;
  d["populations"] = matrix(traj.populations, rows, n);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "XX spin chain state transfer: spectra, dynamics and transfer metrics";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<ChainSpec>(m, "ChainSpec")
      .def_readonly("n_sites", &ChainSpec::n_sites)
      .def_readonly("couplings", &ChainSpec::couplings)
      .def_readonly("fields", &ChainSpec::fields)
      .def("is_mirror_symmetric",
           [](const ChainSpec& c, double tol) { return is_mirror_symmetric(c, tol); },
           py::arg("tol") = 0.0);

  py::class_<Hamiltonian1Ex>(m, "Hamiltonian")
      .def_readonly("diag", &Hamiltonian1Ex::diag)
      .def_readonly("offdiag", &Hamiltonian1Ex::offdiag)
      .def_readonly("energy_offset", &Hamiltonian1Ex::energy_offset)
      .def("__len__", &Hamiltonian1Ex::size)
      .def("dense", [](const Hamiltonian1Ex& h) {
        const std::size_t n = h.size();
        std::vector<double> a(n * n, 0.0);
        for (std::size_t k = 0; k < n; ++k) a[k * n + k] = h.diag[k];
        for (std::size_t k = 0; k + 1 < n; ++k) a[k * n + k + 1] = a[(k + 1) * n + k] = h.offdiag[k];
        return matrix(a, n, n);
      });

  py::class_<EigenDecomposition>(m, "EigenDecomposition")
      .def_property_readonly("values",
                             [](const EigenDecomposition& ed) {
                               return py::array_t<double>(ed.size, ed.values.data());
                             })
      .def_property_readonly(
          "vectors",
          [](const EigenDecomposition& ed) { return matrix(ed.vectors, ed.size, ed.size); },
          "row i is eigenvector i")
      .def_property_readonly("parity", [](const EigenDecomposition& ed) {
        std::vector<std::string> labels;
        for (auto p : ed.parity) labels.emplace_back(to_string(p));
        return labels;
      });

  m.def("build_fields",
        [](std::size_t n, double a, double p) { return build_fields(n, PotentialSpec{a, p}); },
        py::arg("n_sites"), py::arg("a"), py::arg("p"));
  m.def("build_chain",
        [](std::size_t n, double j_edge, double j_bulk, std::optional<std::vector<double>> fields,
           double a, double p) {
          return build_chain(n, j_edge, j_bulk, fields ? *fields : build_fields(n, {a, p}));
        },
        py::arg("n_sites"), py::arg("j_edge") = 1.0, py::arg("j_bulk") = 1.0,
        py::arg("fields") = py::none(), py::arg("a") = 0.0, py::arg("p") = 0.0);
  m.def("chain_from_arrays",
        [](std::vector<double> couplings, std::vector<double> fields) {
          ChainSpec c{fields.size(), std::move(couplings), std::move(fields)};
          c.validate();
          return c;
        },
        py::arg("couplings"), py::arg("fields"));
  m.def("to_single_excitation", &to_single_excitation, py::arg("chain"));
  m.def("decompose",
        [](const Hamiltonian1Ex& h, bool blocks) { return decompose(h, {.use_mirror_blocks = blocks}); },
        py::arg("h"), py::arg("use_mirror_blocks") = true);
  m.def("residual_norm", &residual_norm, py::arg("h"), py::arg("ed"));

  m.def("evolve",
        [](const EigenDecomposition& ed, std::size_t source, const std::vector<double>& times) {
          return trajectory_dict(evolve(ed, source, times));
        },
        py::arg("ed"), py::arg("source"), py::arg("times"));
  m.def("integrate_oracle",
        [](const Hamiltonian1Ex& h, std::size_t source, const std::vector<double>& times) {
          return trajectory_dict(integrate_oracle(h, source, times));
        },
        py::arg("h"), py::arg("source"), py::arg("times"));
  m.def("amplitude", &amplitude, py::arg("ed"), py::arg("source"), py::arg("target"), py::arg("t"));
  m.def("default_time_step", &default_time_step, py::arg("ed"));

  m.def("qst_drop", &qst_drop, py::arg("ed"), py::arg("site") = 1);
  m.def("identify_dimer_modes", [](const EigenDecomposition& ed) {
    const auto d = identify_dimer_modes(ed);
    py::dict out;
    out["index_plus"] = d.index_plus;
    out["index_minus"] = d.index_minus;
    out["E_plus"] = d.e_plus;
    out["E_minus"] = d.e_minus;
    out["ov_plus"] = d.overlap_plus;
    out["ov_minus"] = d.overlap_minus;
    out["degenerate"] = d.degenerate;
    out["ambiguous"] = d.ambiguous;
    return out;
  }, py::arg("ed"));
  m.def("t_star_estimate", &t_star_estimate, py::arg("e_plus"), py::arg("e_minus"));
  m.def("p_threshold", &p_threshold, py::arg("n_sites"), py::arg("a"), py::arg("j"),
        py::arg("pair"));

  m.def("make_report",
        [](const EigenDecomposition& ed, double threshold, std::optional<double> horizon,
           std::optional<double> window, std::optional<double> dt, double floor, bool dynamics,
           std::size_t max_steps) {
          py::gil_scoped_release release;
          const auto r =
              make_report(ed, report_options(threshold, horizon, window, dt, floor, dynamics, max_steps));
          py::gil_scoped_acquire acquire;
          return report_dict(r);
        },
        py::arg("ed"), py::arg("threshold") = 0.95, py::arg("horizon") = py::none(),
        py::arg("window") = py::none(), py::arg("dt") = py::none(), py::arg("floor") = 0.5,
        py::arg("dynamics") = true, py::arg("max_steps") = ReportOptions{}.max_steps);

  m.def("experimental_ratio",
        [](double mass, double omega, double spacing, double hopping) {
          return experimental_ratio(LatticeParams{mass, omega, spacing, hopping});
        },
        py::arg("mass") = constants::rb87_mass, py::arg("omega_trap"), py::arg("lattice_spacing"),
        py::arg("hopping"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = cli::main_entry(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a qst CLI command; returns (exit_code, stdout, stderr).");
}
