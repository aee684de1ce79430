// paam: analyze, simulate, generate, admit, experiment.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "paam/analysis.hpp"
#include "paam/config_io.hpp"
#include "paam/experiments.hpp"
#include "paam/report_io.hpp"
#include "paam/simulator.hpp"
#include "paam/workload.hpp"

namespace {

using namespace paam;

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;

// Raised for bad flag values discovered after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Duration cli_duration(const std::string& text, const char* flag) {
    try {
        return parse_duration(text, TimeUnit::Ns);
    } catch (const std::exception& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

SystemConfig load_config(const std::string& path) {
    std::string text = read_text_file(path);
    try {
        return parse_system(text);
    } catch (const ConfigError& e) {
        throw ConfigError(e.describe(path), e.path(), e.line(), e.column());
    }
}

std::string version_text() {
    std::ostringstream os;
    os << "paam " << PAAM_VERSION << '\n'
       << "config schema v" << kConfigSchemaVersion << '\n'
       << "analysis report v" << kReportSchemaVersion << " (json, csv)\n"
       << "trace v" << kTraceSchemaVersion << '\n'
       << "stats csv v" << kStatsSchemaVersion << '\n';
    return os.str();
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string config;
    std::string csv;
    std::string json;
    bool strict = false;
};

int run_analyze(const AnalyzeArgs& a) {
    const auto sys = load_config(a.config);
    const auto report = analyze(sys);
    std::cout << report_to_text(report);
    if (!a.csv.empty()) write_text_file(a.csv, report_to_csv(report));
    if (!a.json.empty()) write_text_file(a.json, to_json(report).dump(2) + "\n");
    return a.strict && !report.schedulable ? kExitVerdict : kExitOk;
}

// ---- simulate ----------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string mode = "paam";
    std::string duration = "1s";
    std::uint64_t seed = 0;
    std::string trace;
    std::string stats;
    std::string unit_stats;
    std::string check;
    std::vector<std::string> phases;
    int jitter = 0;
    std::string critical_overrun = "queue";
    bool strict = false;
};

int run_simulate(const SimulateArgs& a) {
    const auto sys = load_config(a.config);
    SimOptions opt;
    const auto mode = parse_sim_mode(a.mode);
    if (!mode) throw UsageError("--mode must be paam or fifo, got '" + a.mode + "'");
    opt.mode = *mode;
    opt.duration = cli_duration(a.duration, "--duration");
    opt.seed = a.seed;
    opt.jitter_permille = a.jitter;
    opt.record_trace = false;
    if (a.critical_overrun == "drop") opt.critical_overrun = OverrunPolicy::Drop;
    else if (a.critical_overrun != "queue") throw UsageError("--critical-overrun must be queue or drop");
    for (const auto& p : a.phases) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw UsageError("--phase expects chain=duration, got '" + p + "'");
        opt.phases[p.substr(0, eq)] = cli_duration(p.substr(eq + 1), "--phase");
    }

    std::unique_ptr<std::ofstream> trace_file;
    if (!a.trace.empty()) {
        trace_file = std::make_unique<std::ofstream>(a.trace, std::ios::binary);
        if (!*trace_file) throw std::runtime_error("cannot write " + a.trace);
        opt.trace_stream = trace_file.get();
    }
    std::optional<AnalysisReport> bounds;
    if (!a.check.empty()) {
        try {
            bounds = report_from_json(nlohmann::json::parse(read_text_file(a.check)));
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("--check " + a.check + ": " + e.what());
        }
    }

    SimResult result;
    try {
        result = run_simulation(sys, opt);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (trace_file) trace_file->close();
    std::cout << stats_to_text(result.stats);
    if (!a.stats.empty()) write_text_file(a.stats, stats_to_csv(result.stats));
    if (!a.unit_stats.empty()) write_text_file(a.unit_stats, unit_stats_to_csv(result.stats));

    int code = kExitOk;
    if (bounds) {
        ConformanceReport conf;
        try {
            conf = check_against_bounds(result.stats, *bounds);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        std::cout << conformance_to_text(conf);
        if (!conf.pass) code = kExitVerdict;
    }
    if (a.strict) {
        for (const auto& c : result.stats.chains) {
            if (c.criticality == Criticality::Critical && c.deadline_misses > 0) code = kExitVerdict;
        }
    }
    return code;
}

// ---- generate ----------------------------------------------------------------

struct GenerateArgs {
    std::string params_file;
    int chains = 4;
    int callbacks = 4;
    double util = 0.2;
    std::string ratio = "1:1";
    std::uint64_t seed = 1;
    std::string output;
    std::string period_min = "10ms";
    std::string period_max = "1000ms";
    int buckets = 6;
    int cores = 4;
    int units = 1;
    std::string epsilon = "391us";
    std::string kappa = "130us";
    std::string wait = "spin";
    std::string util_mode = "per_chain";
};

GenParams params_from_flags(const GenerateArgs& a, const CLI::App& app) {
    GenParams p;
    if (!a.params_file.empty()) p = gen_params_from_json(read_text_file(a.params_file));
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--chains")) p.chains = a.chains;
    if (given("--callbacks")) p.callbacks_per_chain = a.callbacks;
    if (given("--util")) p.utilization = a.util;
    if (given("--ratio")) p.ratio = parse_ratio(a.ratio);
    if (given("--seed")) p.seed = a.seed;
    if (given("--period-min")) p.period_min = cli_duration(a.period_min, "--period-min");
    if (given("--period-max")) p.period_max = cli_duration(a.period_max, "--period-max");
    if (given("--buckets")) p.buckets = a.buckets;
    if (given("--cores")) p.cores = a.cores;
    if (given("--units")) p.accelerator_units = a.units;
    if (given("--epsilon")) p.epsilon = cli_duration(a.epsilon, "--epsilon");
    if (given("--kappa")) p.kappa = cli_duration(a.kappa, "--kappa");
    if (given("--wait")) {
        if (a.wait != "spin" && a.wait != "suspend") throw UsageError("--wait must be spin or suspend");
        p.wait = a.wait == "spin" ? WaitPolicy::Spin : WaitPolicy::Suspend;
    }
    if (given("--util-mode")) {
        if (a.util_mode == "per_chain") p.util_mode = UtilMode::PerChain;
        else if (a.util_mode == "uunifast_total") p.util_mode = UtilMode::UUniFastTotal;
        else throw UsageError("--util-mode must be per_chain or uunifast_total");
    }
    validate_params(p);
    return p;
}

int run_generate(const GenerateArgs& a, const CLI::App& app) {
    GenParams p;
    SystemSpec spec;
    try {
        p = params_from_flags(a, app);
        spec = generate_spec(p);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto text = dump_system_spec(spec);
    if (a.output.empty() || a.output == "-") std::cout << text;
    else write_text_file(a.output, text);
    return kExitOk;
}

// ---- admit -------------------------------------------------------------------

struct AdmitArgs {
    std::string config;
    std::string candidate;
};

int run_admit(const AdmitArgs& a) {
    const std::string base_text = read_text_file(a.config);
    SystemSpec base;
    try {
        base = parse_system_spec(base_text);
    } catch (const ConfigError& e) {
        throw ConfigError(e.describe(a.config), e.path(), e.line(), e.column());
    }
    Candidate cand;
    try {
        cand = parse_candidate(read_text_file(a.candidate));
    } catch (const ConfigError& e) {
        throw ConfigError(e.describe(a.candidate), e.path(), e.line(), e.column());
    }
    const auto result = admission_test(base, cand);
    std::cout << (result.accepted ? "ACCEPT" : "REJECT") << ": " << result.reason << '\n';
    if (!result.report.chains.empty()) std::cout << report_to_text(result.report);
    return result.accepted ? kExitOk : kExitVerdict;
}

// ---- experiment ----------------------------------------------------------------

struct ExperimentArgs {
    std::string which;
    int trials = 1000;
    std::uint64_t seed = 1;
    std::string out = "results";
    int threads = 0;
    double util = -1.0;
    int chains = 0;
    std::string ratio;
    std::string duration = "60s";
    std::string scenario;
};

int run_experiment(const ExperimentArgs& a, const CLI::App& app) {
    if (a.trials < 1) throw UsageError("--trials must be >= 1");
    const auto dir = std::filesystem::path(a.out) / a.which / std::to_string(a.seed);
    const auto start = std::chrono::steady_clock::now();
    GenParams base = default_curve_params();
    base.seed = a.seed;
    if (app.count("--util")) base.utilization = a.util;
    if (app.count("--chains")) base.chains = a.chains;
    try {
        if (!a.ratio.empty()) base.ratio = parse_ratio(a.ratio);
        validate_params(base);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::string summary;
    if (a.which == "chain-curve") {
        const auto ms = default_chain_counts();
        const auto pts = run_chain_count_curve(base, ms, a.trials, a.threads);
        write_text_file(dir / "curve.csv", curve_to_csv(pts, "chains"));
        summary = curve_summary(pts, "schedulability vs chain count", "chains", base);
    } else if (a.which == "ratio-curve") {
        const auto rs = default_ratios();
        const auto pts = run_ratio_curve(base, rs, a.trials, a.threads);
        write_text_file(dir / "curve.csv", curve_to_csv(pts, "ratio"));
        summary = curve_summary(pts, "schedulability vs accelerator:CPU ratio (chains " + std::to_string(base.chains) + ")",
                                "ratio", base);
    } else if (a.which == "overloaded") {
        const auto sys =
            a.scenario.empty() ? validate_system(overloaded_scenario_spec()) : load_config(a.scenario);
        const auto r = run_overloaded_accelerator_case(sys, cli_duration(a.duration, "--duration"), a.seed);
        write_text_file(dir / "comparison.csv", overloaded_to_csv(r));
        write_text_file(dir / "paam_stats.csv", stats_to_csv(r.paam));
        write_text_file(dir / "fifo_stats.csv", stats_to_csv(r.fifo));
        summary = overloaded_summary(r);
    } else {
        throw UsageError("unknown experiment '" + a.which + "' (chain-curve, ratio-curve, overloaded)");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream cmd;
    cmd << "rerun: paam experiment " << a.which << " --seed " << a.seed;
    if (a.which == "overloaded") {
        cmd << " --duration " << a.duration;
        if (!a.scenario.empty()) cmd << " --scenario " << a.scenario;
    } else {
        cmd << " --trials " << a.trials;
        if (app.count("--util")) cmd << " --util " << a.util;
        if (app.count("--chains")) cmd << " --chains " << a.chains;
        if (!a.ratio.empty()) cmd << " --ratio " << a.ratio;
    }
    cmd << '\n';
    write_text_file(dir / "summary.txt", summary + cmd.str());
    std::cout << summary << cmd.str() << "wrote " << dir.string() << " (" << std::fixed << std::setprecision(1) << secs
              << "s)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PAAM schedulability analysis and accelerator-server simulation"};
    app.require_subcommand(0, 1);
    bool show_version = false;
    app.add_flag("--version", show_version, "Print tool and file-format versions");

    AnalyzeArgs an;
    auto* analyze_cmd = app.add_subcommand("analyze", "Response-time analysis of a system config");
    analyze_cmd->add_option("config", an.config, "System config (JSON)")->required();
    analyze_cmd->add_option("--csv", an.csv, "Write the per-chain report as CSV");
    analyze_cmd->add_option("--json", an.json, "Write the report as JSON (input for simulate --check)");
    analyze_cmd->add_flag("--strict", an.strict, "Exit 1 when a critical chain is unschedulable");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Discrete-event simulation");
    sim_cmd->add_option("config", sim.config, "System config (JSON)")->required();
    sim_cmd->add_option("--mode", sim.mode, "paam or fifo")->capture_default_str();
    sim_cmd->add_option("--duration", sim.duration, "Simulated time, e.g. 30s")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Seed for execution-time jitter")->capture_default_str();
    sim_cmd->add_option("--trace", sim.trace, "Write the event trace (TSV)");
    sim_cmd->add_option("--stats", sim.stats, "Write per-chain statistics (CSV)");
    sim_cmd->add_option("--unit-stats", sim.unit_stats, "Write per-accelerator-unit statistics (CSV)");
    sim_cmd->add_option("--check", sim.check, "Analysis report JSON to check observed maxima against");
    sim_cmd->add_option("--phase", sim.phases, "First release of a chain, chain=duration (repeatable)");
    sim_cmd->add_option("--jitter", sim.jitter, "Execution-time reduction bound in permille of WCET")
        ->check(CLI::Range(0, 999));
    sim_cmd->add_option("--critical-overrun", sim.critical_overrun, "queue or drop")->capture_default_str();
    sim_cmd->add_flag("--strict", sim.strict, "Exit 1 on any critical deadline miss");

    GenerateArgs gen;
    auto* gen_cmd = app.add_subcommand("generate", "Generate a random chainset config");
    gen_cmd->add_option("--params", gen.params_file, "Generator parameters file (JSON); flags override it");
    gen_cmd->add_option("--chains", gen.chains, "Chain count")->capture_default_str();
    gen_cmd->add_option("--callbacks", gen.callbacks, "Callbacks per chain")->capture_default_str();
    gen_cmd->add_option("--util", gen.util, "Utilization per chain (or total, see --util-mode)")->capture_default_str();
    gen_cmd->add_option("--ratio", gen.ratio, "Accelerator:CPU utilization ratio")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    gen_cmd->add_option("-o,--output", gen.output, "Output config path (default stdout)");
    gen_cmd->add_option("--period-min", gen.period_min)->capture_default_str();
    gen_cmd->add_option("--period-max", gen.period_max)->capture_default_str();
    gen_cmd->add_option("--buckets", gen.buckets)->capture_default_str();
    gen_cmd->add_option("--cores", gen.cores, "Client cores (server core is added)")->capture_default_str();
    gen_cmd->add_option("--units", gen.units, "Accelerator units")->capture_default_str();
    gen_cmd->add_option("--epsilon", gen.epsilon)->capture_default_str();
    gen_cmd->add_option("--kappa", gen.kappa)->capture_default_str();
    gen_cmd->add_option("--wait", gen.wait, "spin or suspend")->capture_default_str();
    gen_cmd->add_option("--util-mode", gen.util_mode, "per_chain or uunifast_total")->capture_default_str();

    AdmitArgs adm;
    auto* admit_cmd = app.add_subcommand("admit", "Admission test for a candidate addition");
    admit_cmd->add_option("config", adm.config, "Current system config")->required();
    admit_cmd->add_option("--candidate", adm.candidate, "Candidate chain file")->required();

    ExperimentArgs ex;
    auto* ex_cmd = app.add_subcommand("experiment", "Run a bundled experiment");
    ex_cmd->add_option("name", ex.which, "chain-curve, ratio-curve or overloaded")->required();
    ex_cmd->add_option("--trials", ex.trials, "Trials per curve point")->capture_default_str();
    ex_cmd->add_option("--seed", ex.seed, "Base seed")->capture_default_str();
    ex_cmd->add_option("--out", ex.out, "Results root directory")->capture_default_str();
    ex_cmd->add_option("--threads", ex.threads, "Worker threads (0 = all cores)");
    ex_cmd->add_option("--util", ex.util, "Per-chain utilization override");
    ex_cmd->add_option("--chains", ex.chains, "Chain count for ratio-curve");
    ex_cmd->add_option("--ratio", ex.ratio, "Accelerator:CPU ratio for chain-curve");
    ex_cmd->add_option("--duration", ex.duration, "Simulated time for overloaded")->capture_default_str();
    ex_cmd->add_option("--scenario", ex.scenario, "Alternative scenario config for overloaded");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }
    if (show_version) {
        std::cout << version_text();
        return kExitOk;
    }
    try {
        if (*analyze_cmd) return run_analyze(an);
        if (*sim_cmd) return run_simulate(sim);
        if (*gen_cmd) return run_generate(gen, *gen_cmd);
        if (*admit_cmd) return run_admit(adm);
        if (*ex_cmd) return run_experiment(ex, *ex_cmd);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    std::cerr << app.help();
    return kExitUsage;
}
