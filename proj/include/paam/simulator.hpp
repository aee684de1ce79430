#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paam/analysis.hpp"
#include "paam/model.hpp"

namespace paam {

inline constexpr int kTraceSchemaVersion = 1;
inline constexpr int kStatsSchemaVersion = 1;

enum class SimMode {
    Paam,        // buckets, priority queues, cross-bucket preemption, epsilon/kappa
    FifoDirect,  // one non-preemptive FIFO per unit, no server overhead
};

enum class OverrunPolicy {
    Queue,  // a release during a running instance waits its turn
    Drop,   // the older unfinished instance is abandoned
};

/// Trace event kinds.
enum class EventKind {
    ChainRelease,
    CbStart,
    CpuSegDone,
    ReqSubmit,
    ReqEnqueue,
    AccStart,
    AccPreempt,
    AccResume,
    AccDone,
    CbDone,
    ChainDone,
};

std::string_view to_string(EventKind k);
std::string_view to_string(SimMode m);
std::optional<SimMode> parse_sim_mode(std::string_view s);

struct SimEvent {
    Instant time;
    EventKind kind = EventKind::ChainRelease;
    int chain = -1;
    int callback = -1;
    int segment = -1;
    int accelerator = -1;
    int unit = -1;
    int bucket = -1;
    /// ACC_PREEMPT only: bucket and chain of the request that preempted.
    int preempter_bucket = -1;
    int preempter_chain = -1;

    bool operator==(const SimEvent&) const = default;
};

struct SimOptions {
    SimMode mode = SimMode::Paam;
    Duration duration = Duration::s(1);
    std::uint64_t seed = 0;
    /// First release per chain id; chains not listed release at 0.
    std::map<std::string, Duration> phases;
    OverrunPolicy critical_overrun = OverrunPolicy::Queue;
    OverrunPolicy best_effort_overrun = OverrunPolicy::Drop;
    /// Segments execute for wcet - U{0, wcet * jitter_permille / 1000}; 0 = exact WCET.
    int jitter_permille = 0;
    bool record_trace = true;
    bool record_core_timeline = false;
    /// When set, the header and then each trace line are streamed here as produced.
    std::ostream* trace_stream = nullptr;
};

struct InstanceRecord {
    Instant release;
    Instant finish;
    Duration response() const { return finish - release; }
};

struct ChainStats {
    std::string id;
    Criticality criticality = Criticality::Critical;
    Duration period;
    Duration deadline;
    std::int64_t released = 0;
    std::int64_t completed = 0;
    std::int64_t dropped = 0;
    std::int64_t deadline_misses = 0;
    std::vector<InstanceRecord> instances;  // completed instances in finish order
    std::optional<Duration> min_response;
    std::optional<Duration> max_response;
    double mean_response_ns = 0.0;
    std::optional<Duration> p50, p90, p99;
};

struct UnitStats {
    std::string accelerator;
    int unit = 0;
    Duration busy_time;      // time with at least one request executing
    Duration executed_time;  // request progress, including charged preemption cost
    double busy_fraction = 0.0;
    std::int64_t preemptions = 0;
    std::int64_t completed_requests = 0;
};

struct SimStats {
    std::string fingerprint;
    SimMode mode = SimMode::Paam;
    Duration duration;
    std::vector<ChainStats> chains;  // config chain order
    std::vector<UnitStats> units;

    const ChainStats* find(std::string_view chain_id) const;
};

/// Interval during which an executor held a core.
struct CoreSlice {
    int core = 0;
    int executor = 0;
    Instant start;
    Instant end;
};

struct SimResult {
    std::vector<SimEvent> trace;
    SimStats stats;
    std::vector<CoreSlice> core_timeline;
};

/// Deterministic discrete-event simulation of `sys` for `options.duration`.
/// Throws std::invalid_argument for a non-positive duration or jitter >= 1000.
SimResult run_simulation(const SystemConfig& sys, const SimOptions& options);

// ---------------------------------------------------------------------------
// Conformance of observed response times against analysis bounds.
// ---------------------------------------------------------------------------

enum class Verdict { Pass, Fail, Excluded };
std::string_view to_string(Verdict v);

struct ConformanceRow {
    std::string chain;
    Criticality criticality = Criticality::Critical;
    std::optional<Duration> observed_max;
    Bound bound;
    /// bound - observed_max when both exist.
    std::optional<Duration> margin;
    Verdict verdict = Verdict::Pass;
};

struct ConformanceReport {
    bool pass = true;
    std::vector<ConformanceRow> rows;
};

/// PASS per CRITICAL chain iff observed max <= R_c; BEST_EFFORT chains are
/// listed as Excluded with margins. Throws std::invalid_argument when the
/// two inputs were produced from different systems.
ConformanceReport check_against_bounds(const SimStats& stats, const AnalysisReport& report);

// ---------------------------------------------------------------------------
// Output formats.
// ---------------------------------------------------------------------------

/// "# paam-trace v1" then a column header line.
void write_trace_header(std::ostream& os);
void write_trace_line(std::ostream& os, const SystemConfig& sys, const SimEvent& e);
std::string trace_to_string(const SystemConfig& sys, std::span<const SimEvent> trace);

std::string stats_to_csv(const SimStats& stats);
std::string unit_stats_to_csv(const SimStats& stats);
std::string stats_to_text(const SimStats& stats);
std::string conformance_to_text(const ConformanceReport& report);

}  // namespace paam
