#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "paam/analysis.hpp"
#include "paam/simulator.hpp"
#include "paam/workload.hpp"

namespace paam {

struct CurvePoint {
    std::string x;  // chain count or "a:b" ratio
    double acceptance_ratio = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
};

/// Defaults shared by the curve experiments and the CLI.
GenParams default_curve_params();
std::vector<int> default_chain_counts();
/// 1:9, 2:8, ..., 7:3 (accelerator:CPU).
std::vector<Ratio> default_ratios();

/// One point per m; every point reuses base.seed so trial i of each point
/// draws from the same stream.
std::vector<CurvePoint> run_chain_count_curve(const GenParams& base, std::span<const int> m_values, int trials,
                                              int threads = 0);
std::vector<CurvePoint> run_ratio_curve(const GenParams& base, std::span<const Ratio> ratios, int trials,
                                        int threads = 0);

/// "# paam-curve-csv v1", then x_name,acceptance_ratio,trials,seed.
std::string curve_to_csv(std::span<const CurvePoint> points, std::string_view x_name);
std::string curve_summary(std::span<const CurvePoint> points, std::string_view title, std::string_view x_name,
                          const GenParams& base);

struct OverloadedRow {
    std::string chain;
    Criticality criticality = Criticality::Critical;
    Bound bound;
    std::optional<Duration> paam_max;
    double paam_mean_ns = 0.0;
    std::optional<Duration> fifo_max;
    double fifo_mean_ns = 0.0;
    std::int64_t paam_dropped = 0;
    std::int64_t fifo_dropped = 0;
};

struct OverloadedReport {
    std::vector<OverloadedRow> rows;
    AnalysisReport analysis;
    SimStats paam;
    SimStats fifo;
    std::string focus_chain;  // highest-priority critical chain
    double focus_reduction = 0.0;  // 1 - paam_max / fifo_max
    bool critical_bounded = false;  // every critical chain's PAAM max <= its bound
    bool focus_faster = false;      // focus chain PAAM max < FIFO max
};

/// Two critical chains (120ms and 220ms) and four best-effort chains, each a
/// single callback [CPU 1ms, ACCEL 50ms, CPU 1ms] on a six-bucket GPU;
/// best-effort chains re-arrive every 52ms.
SystemSpec overloaded_scenario_spec();

/// Simulates both modes with overrunning instances dropped (critical chains
/// included), so each maximum is a per-instance latency.
OverloadedReport run_overloaded_accelerator_case(const SystemConfig& sys, Duration duration, std::uint64_t seed);
/// Bundled scenario, 60s.
OverloadedReport run_overloaded_accelerator_case();

std::string overloaded_to_csv(const OverloadedReport& r);
std::string overloaded_summary(const OverloadedReport& r);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace paam
