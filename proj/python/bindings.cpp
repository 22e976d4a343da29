#include <memory>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vortex/config.hpp"
#include "vortex/kernel.hpp"
#include "vortex/matrix.hpp"
#include "vortex/run.hpp"
#include "vortex/specfun.hpp"
#include "vortex/spectra.hpp"
#include "vortex/version.hpp"

namespace py = pybind11;
using namespace vortex;

namespace {

py::dict spectrum_dict(const OamSpectrum &s) {
  py::dict d;
  d["l_in"] = s.l_in;
  d["alpha"] = s.alpha;
  d["R0"] = s.R0;
  d["weights"] = s.weights;
  std::map<int, std::complex<double>> amps;
  for (const auto &[l, a] : s.raw)
    amps[l] = a.value;
  d["amplitudes"] = amps;
  d["total"] = s.total;
  d["boundary_weight"] = s.boundary_weight;
  d["window_too_narrow"] = s.window_too_narrow;
  d["converged"] = s.converged;
  d["spread"] = spectral_spread(s);
  d["mean_l_out"] = mean_l_out(s);
  return d;
}

SpectrumOptions spectrum_opts(std::pair<int, int> window, int threads) {
  SpectrumOptions o;
  o.window = Window{window.first, window.second};
  o.threads = threads;
  return o;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "OAM transfer from Bessel vortex beams to off-axis atomic transitions";
  m.attr("__version__") = kVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("bessel_j", &bessel_j, py::arg("n"), py::arg("x"));
  m.def("kernel_fourier", &kernel_fourier, py::arg("lam"), py::arg("r_prime"), py::arg("q"),
        py::arg("tol") = 1e-10);
  m.def("azimuthal_selection", &azimuthal_selection, py::arg("lam"), py::arg("alpha"));
  m.def("beam_reconstruct", &beam_reconstruct, py::arg("l"), py::arg("k_rho"), py::arg("R0"),
        py::arg("r_prime"), py::arg("phi_prime"), py::arg("P"));
  m.def("beam_direct", &beam_direct, py::arg("l"), py::arg("k_rho"), py::arg("R0"),
        py::arg("r_prime"), py::arg("phi_prime"));
  m.def("enumerate_channels", [](int l, int alpha, int P) {
    std::vector<int> out;
    for (const auto &c : enumerate_channels(l, alpha, P))
      out.push_back(c.l_out);
    return out;
  });

  py::class_<AtomicState>(m, "AtomicState")
      .def(py::init<int, int, double, int>(), py::arg("m"), py::arg("n") = 0,
           py::arg("a") = 1.0, py::arg("sign") = 1)
      .def_readonly("m", &AtomicState::m)
      .def_readonly("n", &AtomicState::n)
      .def_readonly("a", &AtomicState::a)
      .def("u", [](const AtomicState &s, double q) { return radial_u(s, q); });

  py::class_<DipoleTransition>(m, "DipoleTransition")
      .def(py::init<const AtomicState &, const AtomicState &>())
      .def_property_readonly("alpha", &DipoleTransition::alpha)
      .def_property_readonly("initial", &DipoleTransition::initial)
      .def_property_readonly("final_state", &DipoleTransition::final_state)
      .def("pair_density", &DipoleTransition::pair_density);
  m.def("default_transition", &default_transition, py::arg("alpha"), py::arg("a") = 1.0);

  py::class_<ExpansionEngine>(m, "ExpansionEngine")
      .def(py::init([](double k_in, double k_out, const DipoleTransition &t, double tol,
                       const std::string &selection) {
             MatrixOptions o;
             o.tol = tol;
             if (selection != "plus" && selection != "minus")
               throw ValidationError("selection must be 'plus' or 'minus'");
             o.selection_sign = selection == "plus" ? SelectionSign::plus : SelectionSign::minus;
             return std::make_unique<ExpansionEngine>(k_in, k_out, t, o);
           }),
           py::arg("k_in"), py::arg("k_out"), py::arg("transition"), py::arg("tol") = 1e-6,
           py::arg("selection") = "plus")
      .def("amplitude",
           [](const ExpansionEngine &e, int l_in, int l_out, double R0) {
             py::gil_scoped_release nogil;
             return e.amplitude(l_in, l_out, R0).value;
           },
           py::arg("l_in"), py::arg("l_out"), py::arg("R0"))
      .def("spectrum",
           [](const ExpansionEngine &e, int l_in, double R0, std::pair<int, int> window,
              int threads) {
             OamSpectrum s;
             {
               py::gil_scoped_release nogil;
               s = oam_spectrum(e, l_in, R0, spectrum_opts(window, threads));
             }
             return spectrum_dict(s);
           },
           py::arg("l_in"), py::arg("R0"), py::arg("window") = std::pair{-6, 8},
           py::arg("threads") = 1)
      .def("limit_study",
           [](const ExpansionEngine &e, int l_in, const std::vector<double> &R0,
              std::pair<int, int> window, int threads) {
             std::vector<LimitRow> rows;
             {
               py::gil_scoped_release nogil;
               rows = onaxis_limit_study(e, l_in, R0, spectrum_opts(window, threads));
             }
             std::vector<std::pair<double, double>> out;
             for (const auto &r : rows)
               out.emplace_back(r.R0, r.off_weight);
             return out;
           },
           py::arg("l_in"), py::arg("R0_sequence"), py::arg("window") = std::pair{-6, 8},
           py::arg("threads") = 1);

  py::class_<DirectEngine>(m, "DirectEngine")
      .def(py::init([](double k_in, double k_out, const DipoleTransition &t, double tol,
                       int threads) {
             MatrixOptions o;
             o.tol = tol;
             o.threads = threads;
             py::gil_scoped_release nogil;
             return std::make_unique<DirectEngine>(k_in, k_out, t, o);
           }),
           py::arg("k_in"), py::arg("k_out"), py::arg("transition"), py::arg("tol") = 1e-4,
           py::arg("threads") = 1)
      .def("amplitude",
           [](const DirectEngine &e, int l_in, int l_out, double R0) {
             py::gil_scoped_release nogil;
             return e.amplitude(l_in, l_out, R0).value;
           },
           py::arg("l_in"), py::arg("l_out"), py::arg("R0"));

  py::class_<DichroismEngines>(m, "DichroismEngines")
      .def(py::init([](double k_in, double k_out, const DipoleTransition &plus, double tol) {
             MatrixOptions o;
             o.tol = tol;
             return std::make_unique<DichroismEngines>(k_in, k_out, chiral_pair(plus), o);
           }),
           py::arg("k_in"), py::arg("k_out"), py::arg("plus_transition"), py::arg("tol") = 1e-6)
      .def("signal",
           [](const DichroismEngines &e, int l_in, double R0, std::pair<int, int> window,
              int threads) {
             py::gil_scoped_release nogil;
             return dichroic_signal(e, l_in, R0, spectrum_opts(window, threads)).D;
           },
           py::arg("l_in"), py::arg("R0"), py::arg("window") = std::pair{-6, 8},
           py::arg("threads") = 1)
      .def("cluster_average",
           [](const DichroismEngines &e, int l_in, double Rc, int n_samples,
              std::pair<int, int> window, int threads) {
             py::gil_scoped_release nogil;
             return cluster_average(e, l_in, Rc, n_samples, spectrum_opts(window, threads)).D;
           },
           py::arg("l_in"), py::arg("cluster_radius"), py::arg("n_samples") = 16,
           py::arg("window") = std::pair{-6, 8}, py::arg("threads") = 1);

  m.def("parse_config", [](const std::string &text) { return render(parse_config(text)); },
        py::arg("text"), "Validate a run config and return its canonical text.");
  m.def("config_hash",
        [](const std::string &text) { return hex64(config_hash(parse_config(text))); });
  m.def(
      "run",
      [](const std::string &command, const std::string &text, const std::string &format,
         int threads) {
        const auto cfg = parse_config(text);
        RunResult r;
        {
          py::gil_scoped_release nogil;
          if (command == "spectrum")
            r = run_spectrum(cfg, threads);
          else if (command == "dichroism")
            r = run_dichroism(cfg, threads);
          else if (command == "limit-study")
            r = run_limit_study(cfg, threads);
          else
            throw ValidationError("unknown command '" + command + "'");
        }
        if (format != "csv" && format != "json")
          throw ValidationError("format must be csv or json");
        return format_output(r, cfg, format == "json" ? OutputFormat::json : OutputFormat::csv);
      },
      py::arg("command"), py::arg("config_text"), py::arg("format") = "csv",
      py::arg("threads") = 1);
  m.def(
      "verify",
      [](bool full, int threads) {
        std::vector<VerifyCheck> checks;
        {
          py::gil_scoped_release nogil;
          checks = run_verify(full ? VerifyLevel::full : VerifyLevel::quick, threads);
        }
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto &c : checks)
          out.emplace_back(c.name, c.passed, c.detail);
        return out;
      },
      py::arg("full") = false, py::arg("threads") = 1);
}
