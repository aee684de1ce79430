// Thin Python surface over the core library. Config documents cross the
// boundary as JSON text; results come back as JSON text or plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "paam/analysis.hpp"
#include "paam/config_io.hpp"
#include "paam/report_io.hpp"
#include "paam/simulator.hpp"
#include "paam/workload.hpp"

namespace py = pybind11;
using namespace paam;

namespace {

py::object ns_or_none(const std::optional<Duration>& d) {
    if (!d) return py::none();
    return py::int_(d->count());
}

py::dict stats_to_dict(const SimStats& s) {
    py::dict out;
    out["fingerprint"] = s.fingerprint;
    out["mode"] = std::string(to_string(s.mode));
    out["duration_ns"] = s.duration.count();
    py::list chains;
    for (const auto& c : s.chains) {
        py::dict d;
        d["id"] = c.id;
        d["criticality"] = std::string(to_string(c.criticality));
        d["released"] = c.released;
        d["completed"] = c.completed;
        d["dropped"] = c.dropped;
        d["deadline_misses"] = c.deadline_misses;
        d["max_response_ns"] = ns_or_none(c.max_response);
        d["mean_response_ns"] = c.mean_response_ns;
        chains.append(d);
    }
    out["chains"] = chains;
    py::list units;
    for (const auto& u : s.units) {
        py::dict d;
        d["accelerator"] = u.accelerator;
        d["unit"] = u.unit;
        d["busy_fraction"] = u.busy_fraction;
        d["preemptions"] = u.preemptions;
        d["completed_requests"] = u.completed_requests;
        units.append(d);
    }
    out["units"] = units;
    return out;
}

SimOptions make_options(const std::string& mode, const std::string& duration, std::uint64_t seed, int jitter) {
    SimOptions opt;
    const auto m = parse_sim_mode(mode);
    if (!m) throw std::invalid_argument("unknown mode '" + mode + "' (expected paam or fifo)");
    opt.mode = *m;
    opt.duration = parse_duration(duration);
    opt.seed = seed;
    opt.jitter_permille = jitter;
    return opt;
}

}  // namespace

PYBIND11_MODULE(_paam, m) {
    m.doc() = "Response-time analysis and simulation for prioritized accelerator access";
    m.attr("__version__") = PAAM_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("fingerprint", [](const std::string& config) { return fingerprint(parse_system(config)); },
          py::arg("config"));

    m.def("canonical_config", [](const std::string& config) { return dump_system_spec(parse_system_spec(config)); },
          py::arg("config"));

    m.def(
        "analyze", [](const std::string& config) { return to_json(analyze(parse_system(config))).dump(2); },
        py::arg("config"), "Analysis report as a JSON document.");

    m.def(
        "analyze_csv", [](const std::string& config) { return report_to_csv(analyze(parse_system(config))); },
        py::arg("config"));

    m.def(
        "simulate",
        [](const std::string& config, const std::string& mode, const std::string& duration, std::uint64_t seed,
           int jitter_permille, bool trace) {
            const auto sys = parse_system(config);
            auto opt = make_options(mode, duration, seed, jitter_permille);
            opt.record_trace = trace;
            SimResult r;
            {
                py::gil_scoped_release release;
                r = run_simulation(sys, opt);
            }
            py::dict out = stats_to_dict(r.stats);
            if (trace) out["trace"] = trace_to_string(sys, r.trace);
            return out;
        },
        py::arg("config"), py::arg("mode") = "paam", py::arg("duration") = "1s", py::arg("seed") = 0,
        py::arg("jitter_permille") = 0, py::arg("trace") = false);

    m.def(
        "check",
        [](const std::string& config, const std::string& report_json, const std::string& duration,
           std::uint64_t seed) {
            const auto sys = parse_system(config);
            const auto report = report_from_json(nlohmann::json::parse(report_json));
            auto opt = make_options("paam", duration, seed, 0);
            opt.record_trace = false;
            const auto conf = check_against_bounds(run_simulation(sys, opt).stats, report);
            py::list rows;
            for (const auto& row : conf.rows) {
                py::dict d;
                d["chain"] = row.chain;
                d["verdict"] = std::string(to_string(row.verdict));
                d["observed_max_ns"] = ns_or_none(row.observed_max);
                d["bound_ns"] = ns_or_none(row.bound);
                rows.append(d);
            }
            return py::make_tuple(conf.pass, rows);
        },
        py::arg("config"), py::arg("report"), py::arg("duration") = "1s", py::arg("seed") = 0);

    m.def(
        "admit",
        [](const std::string& base, const std::string& candidate) {
            const auto r = admission_test(parse_system_spec(base), parse_candidate(candidate));
            return py::make_tuple(r.accepted, r.reason, r.failing_chain);
        },
        py::arg("base"), py::arg("candidate"), "(accepted, reason, failing_chain)");

    m.def(
        "generate",
        [](const std::string& params_json) {
            return dump_system_spec(generate_spec(gen_params_from_json(params_json)));
        },
        py::arg("params") = "{}", "Generated config document from a JSON object of generator parameters.");

    m.def(
        "schedulability_ratio",
        [](const std::string& params_json, int trials) {
            const auto p = gen_params_from_json(params_json);
            py::gil_scoped_release release;
            return schedulability_ratio(p, trials, 1);
        },
        py::arg("params"), py::arg("trials"));

    m.def(
        "arrival_bound", [](std::int64_t t_ns, std::int64_t period_ns) {
            return arrival_bound(Duration(t_ns), Duration(period_ns));
        },
        py::arg("t_ns"), py::arg("period_ns"));

    m.def(
        "assign_buckets",
        [](const std::vector<int>& priorities, int buckets) { return assign_buckets(priorities, buckets); },
        py::arg("priorities"), py::arg("buckets"));

    m.def("parse_duration", [](const std::string& text) { return parse_duration(text).count(); },
          py::arg("text"), "Nanoseconds.");
}
