#include "paam/experiments.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace paam {

GenParams default_curve_params() {
    GenParams p;
    p.chains = 4;
    p.callbacks_per_chain = 4;
    p.utilization = 0.05;
    p.ratio = {1, 1};
    p.cores = 4;
    p.buckets = 6;
    p.seed = 1;
    return p;
}

std::vector<int> default_chain_counts() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

std::vector<Ratio> default_ratios() {
    std::vector<Ratio> out;
    for (int a = 1; a <= 7; ++a) out.push_back({a, 10 - a});
    return out;
}

std::vector<CurvePoint> run_chain_count_curve(const GenParams& base, std::span<const int> m_values, int trials,
                                              int threads) {
    std::vector<CurvePoint> out;
    for (int m : m_values) {
        GenParams p = base;
        p.chains = m;
        out.push_back({std::to_string(m), schedulability_ratio(p, trials, threads), trials, base.seed});
    }
    return out;
}

std::vector<CurvePoint> run_ratio_curve(const GenParams& base, std::span<const Ratio> ratios, int trials,
                                        int threads) {
    std::vector<CurvePoint> out;
    for (const auto& r : ratios) {
        GenParams p = base;
        p.ratio = r;
        out.push_back({to_string(r), schedulability_ratio(p, trials, threads), trials, base.seed});
    }
    return out;
}

std::string curve_to_csv(std::span<const CurvePoint> points, std::string_view x_name) {
    std::ostringstream os;
    os << "# paam-curve-csv v1\n" << x_name << ",acceptance_ratio,trials,seed\n";
    for (const auto& p : points) {
        os << p.x << ',' << std::fixed << std::setprecision(4) << p.acceptance_ratio << ',' << p.trials << ','
           << p.seed << '\n';
    }
    return os.str();
}

std::string curve_summary(std::span<const CurvePoint> points, std::string_view title, std::string_view x_name,
                          const GenParams& base) {
    std::ostringstream os;
    os << title << '\n'
       << "callbacks/chain " << base.callbacks_per_chain << ", U " << base.utilization << " ("
       << to_string(base.util_mode) << "), ratio " << to_string(base.ratio) << ", periods "
       << format_duration(base.period_min) << ".." << format_duration(base.period_max) << ", " << base.cores
       << " client cores, " << base.buckets << " buckets, wait " << to_string(base.wait) << ", seed " << base.seed
       << '\n';
    for (const auto& p : points) {
        os << "  " << x_name << ' ' << std::setw(5) << p.x << "  " << std::fixed << std::setprecision(3)
           << p.acceptance_ratio << "  ";
        const int bars = static_cast<int>(std::lround(p.acceptance_ratio * 40));
        os << std::string(static_cast<std::size_t>(bars), '#') << '\n';
    }
    return os.str();
}

SystemSpec overloaded_scenario_spec() {
    SystemSpec s;
    s.cores = 5;  // four client cores, server on core 4
    AcceleratorSpec gpu;
    gpu.id = "gpu";
    gpu.buckets = 6;
    gpu.server_core = 4;
    s.accelerators.push_back(gpu);

    struct Row {
        const char* id;
        Duration period;
        int priority;
        Criticality crit;
        int core;
    };
    const Row rows[] = {
        {"chain1", Duration::ms(120), 6, Criticality::Critical, 0},
        {"chain2", Duration::ms(220), 5, Criticality::Critical, 1},
        {"be1", Duration::ms(52), 4, Criticality::BestEffort, 0},
        {"be2", Duration::ms(52), 3, Criticality::BestEffort, 1},
        {"be3", Duration::ms(52), 2, Criticality::BestEffort, 2},
        {"be4", Duration::ms(52), 1, Criticality::BestEffort, 3},
    };
    for (const auto& r : rows) {
        const std::string cb = std::string(r.id) + "_cb";
        s.callbacks.push_back({cb,
                               {{SegmentKind::Cpu, Duration::ms(1), ""},
                                {SegmentKind::Accel, Duration::ms(50), "gpu"},
                                {SegmentKind::Cpu, Duration::ms(1), ""}}});
        s.chains.push_back({r.id, {cb}, r.period, r.period, r.priority, r.crit});
        s.executors.push_back({std::string("x_") + r.id, {cb}, r.core, r.priority, WaitPolicy::Spin});
    }
    return s;
}

OverloadedReport run_overloaded_accelerator_case(const SystemConfig& sys, Duration duration, std::uint64_t seed) {
    OverloadedReport out;
    out.analysis = analyze(sys);
    SimOptions opt;
    opt.duration = duration;
    opt.seed = seed;
    opt.record_trace = false;
    // Queued overruns would make the FIFO maximum grow with the run length.
    opt.critical_overrun = OverrunPolicy::Drop;
    opt.mode = SimMode::Paam;
    out.paam = run_simulation(sys, opt).stats;
    opt.mode = SimMode::FifoDirect;
    out.fifo = run_simulation(sys, opt).stats;

    out.critical_bounded = true;
    for (std::size_t c = 0; c < sys.chains.size(); ++c) {
        OverloadedRow row;
        row.chain = sys.chains[c].id;
        row.criticality = sys.chains[c].criticality;
        row.bound = out.analysis.chains[c].response;
        row.paam_max = out.paam.chains[c].max_response;
        row.paam_mean_ns = out.paam.chains[c].mean_response_ns;
        row.paam_dropped = out.paam.chains[c].dropped;
        row.fifo_max = out.fifo.chains[c].max_response;
        row.fifo_mean_ns = out.fifo.chains[c].mean_response_ns;
        row.fifo_dropped = out.fifo.chains[c].dropped;
        if (row.criticality == Criticality::Critical) {
            const bool ok = row.bound && row.paam_max && *row.paam_max <= *row.bound;
            out.critical_bounded = out.critical_bounded && ok;
        }
        out.rows.push_back(std::move(row));
    }
    for (int c : sys.chains_by_priority()) {
        if (sys.chains[c].criticality != Criticality::Critical) continue;
        const auto& row = out.rows[c];
        out.focus_chain = row.chain;
        if (row.paam_max && row.fifo_max && row.fifo_max->count() > 0) {
            out.focus_reduction =
                1.0 - static_cast<double>(row.paam_max->count()) / static_cast<double>(row.fifo_max->count());
            out.focus_faster = *row.paam_max < *row.fifo_max;
        }
        break;
    }
    return out;
}

OverloadedReport run_overloaded_accelerator_case() {
    return run_overloaded_accelerator_case(validate_system(overloaded_scenario_spec()), Duration::s(60), 1);
}

std::string overloaded_to_csv(const OverloadedReport& r) {
    std::ostringstream os;
    auto ns = [](const std::optional<Duration>& d) { return d ? std::to_string(d->count()) : std::string(); };
    os << "# paam-overloaded-csv v1\n"
       << "chain,criticality,bound_ns,paam_max_ns,paam_mean_ns,paam_dropped,fifo_max_ns,fifo_mean_ns,fifo_dropped\n";
    for (const auto& row : r.rows) {
        os << row.chain << ',' << to_string(row.criticality) << ',' << (row.bound ? ns(row.bound) : "UNSCHEDULABLE")
           << ',' << ns(row.paam_max) << ',' << std::llround(row.paam_mean_ns) << ',' << row.paam_dropped << ','
           << ns(row.fifo_max) << ',' << std::llround(row.fifo_mean_ns) << ',' << row.fifo_dropped << '\n';
    }
    return os.str();
}

std::string overloaded_summary(const OverloadedReport& r) {
    std::ostringstream os;
    auto show = [](const std::optional<Duration>& d) { return d ? format_duration(*d) : std::string("-"); };
    auto mean = [](const std::optional<Duration>& any, double ns) {
        return any ? format_duration(Duration(std::llround(ns))) : std::string("-");
    };
    os << "overloaded accelerator: PAAM vs direct FIFO, " << format_duration(r.paam.duration) << " simulated\n";
    os << std::left << std::setw(10) << "chain" << std::setw(12) << "class" << std::setw(16) << "bound"
       << std::setw(14) << "paam max" << std::setw(14) << "paam mean" << std::setw(14) << "fifo max"
       << std::setw(14) << "fifo mean" << "mean change\n";
    for (const auto& row : r.rows) {
        os << std::setw(9) << row.chain << ' ' << std::setw(12) << to_string(row.criticality) << std::setw(16)
           << format_bound(row.bound, "UNSCHEDULABLE") << std::setw(14) << show(row.paam_max) << std::setw(14)
           << mean(row.paam_max, row.paam_mean_ns) << std::setw(14) << show(row.fifo_max) << std::setw(14)
           << mean(row.fifo_max, row.fifo_mean_ns);
        if (row.paam_max && row.fifo_max) {
            os << std::showpos << std::fixed << std::setprecision(1)
               << 100.0 * (row.paam_mean_ns / row.fifo_mean_ns - 1.0) << '%' << std::noshowpos;
        }
        os << '\n';
    }
    os << "critical chains within bound: " << (r.critical_bounded ? "yes" : "NO") << '\n'
       << r.focus_chain << " max response reduction vs FIFO: " << std::fixed << std::setprecision(1)
       << 100.0 * r.focus_reduction << "%\n"
       << "(overrunning instances are dropped in both modes; '-' marks chains that never completed)\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace paam
