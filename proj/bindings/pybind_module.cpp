// Python bindings for the scheduling and simulation entry points. Scenarios
// and schedules stay opaque; everything crossing the boundary is plain
// Python data (str, dict, list) so callers never touch the C++ value types.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "vemo/controlplane.hpp"
#include "vemo/metrics.hpp"
#include "vemo/scenario.hpp"
#include "vemo/schedule.hpp"
#include "vemo/scheduler.hpp"
#include "vemo/sim.hpp"
#include "vemo/signal.hpp"
#include "vemo/waveform.hpp"

namespace py = pybind11;
using namespace vemo;

namespace {

std::vector<std::string> violation_strings(const Scenario& s, const Schedule& sched) {
    std::vector<std::string> out;
    for (const auto& v : validate_schedule(s, sched)) {
        std::ostringstream ss;
        ss << v.constraint << " " << v.platform << "@" << v.epoch << ": " << v.detail;
        out.push_back(ss.str());
    }
    return out;
}

py::dict utility_dict(const UtilityReport& u) {
    py::dict d;
    d["total"] = u.total;
    py::dict per;
    for (const auto& [task, sat] : u.per_task) per[py::str(task)] = sat;
    d["per_task"] = per;
    return d;
}

} // namespace

PYBIND11_MODULE(pyvemo, m) {
    m.doc() = "Epoch scheduler and complex-baseband co-simulator";

    py::class_<Scenario>(m, "Scenario")
        .def_property_readonly("num_epochs", [](const Scenario& s) { return s.num_epochs; })
        .def_property_readonly("epoch_duration_s",
                               [](const Scenario& s) { return s.epoch_duration_s; })
        .def_property_readonly("platform_ids",
                               [](const Scenario& s) {
                                   std::vector<std::string> ids;
                                   for (const auto& p : s.platforms) ids.push_back(p.id);
                                   return ids;
                               })
        .def_property_readonly("task_ids",
                               [](const Scenario& s) {
                                   std::vector<std::string> ids;
                                   for (const auto& t : s.tasks) ids.push_back(t.id);
                                   return ids;
                               })
        .def("__repr__", [](const Scenario& s) {
            std::ostringstream ss;
            ss << "<Scenario " << s.platforms.size() << " platforms, " << s.tasks.size()
               << " tasks, " << s.num_epochs << " epochs>";
            return ss.str();
        });

    py::class_<Schedule>(m, "Schedule")
        .def("__len__", [](const Schedule& sched) { return sched.cells.size(); })
        .def("__eq__", [](const Schedule& a, const Schedule& b) { return a == b; })
        .def("__repr__", [](const Schedule& sched) {
            std::ostringstream ss;
            ss << "<Schedule " << sched.cells.size() << " occupied cells>";
            return ss.str();
        });

    py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);

    m.def("parse_scenario", &parse_scenario, py::arg("text"),
          "Parse a scenario from its JSON text");
    m.def("render_scenario", &render_scenario, py::arg("scenario"));

    m.def(
        "build_schedule",
        [](const Scenario& s, int budget, std::uint64_t seed) {
            const auto r = build_schedule(s, budget, seed);
            py::dict unscheduled;
            for (const auto& [task, why] : r.unscheduled) unscheduled[py::str(task)] = why;
            return py::make_tuple(r.schedule, unscheduled);
        },
        py::arg("scenario"), py::arg("budget") = 200, py::arg("seed") = 1,
        "Greedy + hill-climbed schedule; returns (schedule, unscheduled reasons)");

    m.def(
        "exhaustive_optimal",
        [](const Scenario& s, std::uint64_t cap) { return exhaustive_optimal(s, cap); },
        py::arg("scenario"), py::arg("combo_cap") = 1'000'000,
        "Brute-force optimum for tiny scenarios; raises CapExceeded past the cap");

    m.def("validate_schedule", &violation_strings, py::arg("scenario"), py::arg("schedule"),
          "Constraint violations as strings; empty list means feasible");

    m.def(
        "utility",
        [](const Scenario& s, const Schedule& sched) { return utility_dict(utility(s, sched)); },
        py::arg("scenario"), py::arg("schedule"));

    m.def("render_schedule_table", &render_schedule_table, py::arg("scenario"),
          py::arg("schedule"));
    m.def("schedule_to_csv", &schedule_to_csv, py::arg("schedule"));
    m.def("parse_schedule_csv", &parse_schedule_csv, py::arg("text"));

    m.def(
        "simulate_json",
        [](const Scenario& s, const Schedule& sched, std::uint64_t seed) {
            return render_sim_report(s, run_simulation(s, sched, seed));
        },
        py::arg("scenario"), py::arg("schedule"), py::arg("seed"),
        "Run the PHY over the schedule; returns the canonical JSON report");

    m.def("inject_control_traffic", &inject_control_traffic, py::arg("scenario"),
          py::arg("orchestrator"));

    m.def(
        "check_dissemination",
        [](const Scenario& s, const Schedule& sched, const std::string& orchestrator) {
            const auto r = check_dissemination(s, sched, orchestrator);
            py::dict informed;
            for (const auto& [p, e] : r.informed_epoch)
                informed[py::str(p)] = e == kNeverInformed ? py::object(py::none())
                                                           : py::object(py::int_(e));
            py::dict paths;
            for (const auto& [p, hops] : r.relay_paths) paths[py::str(p)] = hops;
            py::dict d;
            d["informed_epoch"] = informed;
            d["feasible"] = r.feasible;
            d["relay_paths"] = paths;
            return d;
        },
        py::arg("scenario"), py::arg("schedule"), py::arg("orchestrator"),
        "informed_epoch maps platform to epoch (None = never informed)");

    m.def(
        "simulate_outage",
        [](const Scenario& s, const Schedule& sched,
           const std::vector<std::tuple<int, std::string, std::string>>& outage) {
            const auto r = simulate_outage(s, sched, OutageSet(outage.begin(), outage.end()));
            py::list failed;
            for (const auto& f : r.failed)
                failed.append(py::make_tuple(f.task, f.tx_epoch, f.src, f.dst));
            py::dict d;
            d["baseline"] = utility_dict(r.baseline);
            d["degraded"] = utility_dict(r.degraded);
            d["failed"] = failed;
            return d;
        },
        py::arg("scenario"), py::arg("schedule"), py::arg("outage"),
        "Outage tuples are (tx_epoch, src, dst) of comm transmissions to fail");

    // small numeric surface, mostly so results can be sanity-checked from python
    m.def("q_function", &q_function, py::arg("x"));
    m.def("ber", &ber, py::arg("sent"), py::arg("received"));
    m.def(
        "papr_db", [](const ComplexSignal& sig, double pct) { return papr_db(sig, pct); },
        py::arg("signal"), py::arg("percentile") = 99.9);
    m.def("pn_bits", &pn_bits, py::arg("seed"), py::arg("count"));
}
