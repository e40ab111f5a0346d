#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dcqkd/attacks.hpp"
#include "dcqkd/infotheory.hpp"
#include "dcqkd/protocol.hpp"
#include "dcqkd/sweep.hpp"

namespace py = pybind11;
using namespace dcqkd;

namespace {

py::dict quadratures(Quadratures q) {
  py::dict d;
  d["x"] = q.x;
  d["y"] = q.y;
  return d;
}

Strategy strategy(const std::string& name) {
  const auto s = parse_strategy(name);
  if (!s) throw py::value_error("unknown attack '" + name + "'");
  return *s;
}

py::dict record_dict(const SweepRecord& r) {
  py::dict d;
  d["gamma"] = r.gamma;
  d["eta"] = r.eta;
  d["r_tap"] = r.r_tap;
  d["vs_x"] = r.vs_x;
  d["vs_y"] = r.vs_y;
  d["attack"] = to_string(r.attack);
  d["snr_bx"] = r.snr_bx;
  d["snr_by"] = r.snr_by;
  d["snr_ex"] = r.snr_ex;
  d["snr_ey"] = r.snr_ey;
  d["i_ab"] = r.i_ab;
  d["i_ae"] = r.i_ae;
  d["delta_i"] = r.delta_i;
  d["v_rx"] = r.v_rx;
  d["v_ry"] = r.v_ry;
  d["flags"] = r.flags.to_string();
  return d;
}

}  // namespace

PYBIND11_MODULE(_dcqkd, m) {
  m.doc() = "Round-trip dense-coding CV-QKD model";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ProtocolParams>(m, "ProtocolParams")
      .def(py::init([](double gamma, double eta, double r_tap, double vs_x, double vs_y,
                       double gamma_e, double monitor_bound) {
             ProtocolParams p{gamma, eta, r_tap, vs_x, vs_y, gamma_e, monitor_bound};
             return p;
           }),
           py::arg("gamma") = 0.2, py::arg("eta") = 0.9, py::arg("r_tap") = 0.1,
           py::arg("vs_x") = 10.0, py::arg("vs_y") = 10.0, py::arg("gamma_e") = 0.05,
           py::arg("monitor_bound") = kDefaultMonitorBound)
      .def_readwrite("gamma", &ProtocolParams::gamma)
      .def_readwrite("eta", &ProtocolParams::eta)
      .def_readwrite("r_tap", &ProtocolParams::r_tap)
      .def_readwrite("vs_x", &ProtocolParams::vs_x)
      .def_readwrite("vs_y", &ProtocolParams::vs_y)
      .def_readwrite("gamma_e", &ProtocolParams::gamma_e)
      .def_readwrite("monitor_bound", &ProtocolParams::monitor_bound)
      .def("validate", &ProtocolParams::validate)
      .def("__repr__", [](const ProtocolParams& p) {
        std::ostringstream s;
        s << "ProtocolParams(gamma=" << p.gamma << ", eta=" << p.eta << ", r_tap=" << p.r_tap
          << ", vs_x=" << p.vs_x << ", vs_y=" << p.vs_y << ", gamma_e=" << p.gamma_e << ")";
        return s.str();
      });

  m.def("bob_variances", [](const ProtocolParams& p) { return quadratures(bob_variances(p)); });
  m.def("bob_snr", [](const ProtocolParams& p) { return quadratures(bob_snr(p)); });
  m.def("monitor_variances",
        [](const ProtocolParams& p) { return quadratures(monitor_variances(p)); });
  m.def("required_tap_ratio", &required_tap_ratio, py::arg("gamma"), py::arg("eta"),
        py::arg("v_target"));
  m.def("correlation_after_tap", &correlation_after_tap);

  m.def(
      "evaluate_attack",
      [](const std::string& attack, const ProtocolParams& p) {
        const AttackOutcome o = evaluate_attack(strategy(attack), p);
        py::dict d;
        d["v_ex"] = o.eve.v_ex;
        d["v_ey"] = o.eve.v_ey;
        d["snr_ex"] = o.eve.snr_ex;
        d["snr_ey"] = o.eve.snr_ey;
        d["bob_snr_x"] = o.impact.bob_snr_x;
        d["bob_snr_y"] = o.impact.bob_snr_y;
        d["monitor_vx"] = o.impact.monitor_vx;
        d["monitor_vy"] = o.impact.monitor_vy;
        d["detected"] = o.impact.detected;
        d["flags"] = o.impact.flags.to_string();
        return d;
      },
      py::arg("attack"), py::arg("params"));

  m.def("mutual_info", &mutual_info);
  m.def(
      "key_rate",
      [](const std::string& attack, const ProtocolParams& p) {
        return key_rate(strategy(attack), p).delta_i;
      },
      py::arg("attack"), py::arg("params"));
  m.def("variance_to_db", &variance_to_db, py::arg("v"), py::arg("snl") = 1.0);
  m.def(
      "security_threshold",
      [](double gamma, const std::string& attack, const ProtocolParams& p) {
        const ThresholdResult r = security_threshold(gamma, strategy(attack), p);
        py::dict d;
        d["verdict"] = to_string(r.verdict);
        d["eta_star"] = r.value;
        d["monotone"] = r.monotone;
        d["sign_changes"] = r.sign_changes;
        return d;
      },
      py::arg("gamma"), py::arg("attack"), py::arg("params") = ProtocolParams{});
  m.def("detection_sample_size", &detection_sample_size, py::arg("v_honest"),
        py::arg("v_attacked"), py::arg("false_alarm") = 0.01, py::arg("power") = 0.99);

  m.def(
      "simulate_session",
      [](const ProtocolParams& p, std::size_t n, std::uint64_t seed) {
        SessionTranscript t;
        {
          py::gil_scoped_release release;
          t = simulate_session(p, n, seed);
        }
        py::dict d;
        d["v_bx"] = t.empirical.v_bx;
        d["v_by"] = t.empirical.v_by;
        d["snr_bx"] = t.empirical.snr_bx;
        d["snr_by"] = t.empirical.snr_by;
        d["v_rx"] = t.empirical.v_rx;
        d["v_ry"] = t.empirical.v_ry;
        d["mi_x"] = t.mi_x;
        d["mi_y"] = t.mi_y;
        d["digest"] = t.digest();
        return d;
      },
      py::arg("params"), py::arg("n"), py::arg("seed"));

  m.def(
      "run_sweep",
      [](const std::vector<std::pair<std::string, std::string>>& settings) {
        SweepSpec spec;
        bool attacks_given = false;
        for (const auto& [key, value] : settings) {
          if ((key == "attack") && !attacks_given) {
            spec.attacks.clear();
            attacks_given = true;
          }
          apply_setting(spec, key, value);
        }
        std::vector<SweepRecord> records;
        {
          py::gil_scoped_release release;
          records = run_sweep(spec);
        }
        py::list out;
        for (const auto& r : records) out.append(record_dict(r));
        return out;
      },
      py::arg("settings"),
      "Runs a sweep from (key, value) settings, as in a config file; returns one dict per record.");

  m.def("csv_header", [] { return std::string(kCsvHeader); });
}
