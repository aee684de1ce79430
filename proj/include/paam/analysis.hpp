#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "paam/model.hpp"

namespace paam {

/// Interference relations of a validated system.
///
/// Accelerator-level sets are keyed by index into SystemConfig::accel_segments
/// and only relate segments placed on the same accelerator unit. Chain-level
/// sets are keyed by chain index.
struct InterferenceSets {
    std::vector<std::vector<int>> hps;  // segments of higher-priority chains
    std::vector<std::vector<int>> lps;  // segments of lower-priority chains
    std::vector<std::vector<int>> hp;   // higher-priority chains, same executor
    std::vector<std::vector<int>> lp;   // lower-priority chains, same executor
    std::vector<std::vector<int>> hpp;  // chains of higher process-priority executors, same core
    /// Per chain: the accel_segments indices belonging to it.
    std::vector<std::vector<int>> chain_segments;
    /// Per chain: union of hps over its segments, sorted.
    std::vector<std::vector<int>> chain_hps;
};

InterferenceSets build_interference_sets(const SystemConfig& sys);

struct HandlingBounds {
    Bound per_segment;    // sum of per-segment handling times
    Bound per_chain;      // per-chain handling time at the response-time candidate
    Bound handling;       // min of the two
    Bound handling_star;  // handling + per-request server overhead
};

struct ChainAnalysis {
    int chain = -1;
    std::string id;
    int priority = 0;
    Criticality criticality = Criticality::Critical;
    Duration deadline;
    Duration blocking;
    Duration exec_sum;
    HandlingBounds handling;
    /// Handling time of each of the chain's accelerator segments, in order.
    std::vector<Bound> segment_handling;
    Bound response;  // nullopt: UNSCHEDULABLE
    int iterations = 0;
    bool analyzed = false;
    bool schedulable = false;
    std::string note;
};

struct EndToEndAnalysis {
    std::string id;
    std::vector<std::string> sub_chains;
    Duration comm_cost;
    Bound response;
};

struct AnalysisReport {
    std::string fingerprint;
    std::vector<ChainAnalysis> chains;  // config chain order
    std::vector<EndToEndAnalysis> end_to_end;
    /// All CRITICAL chains schedulable.
    bool schedulable = false;

    const ChainAnalysis* find(std::string_view chain_id) const;
};

/// Requests a segment of period `period` can issue in any window of length
/// t: ceil(t / period) + 1, the +1 covering a carry-in job.
/// Throws std::invalid_argument when period <= 0 or t < 0.
std::int64_t arrival_bound(Duration t, Duration period);

/// Accelerator segment WCET inflated by the preemption cost: A + 2*kappa.
Duration inflated_wcet(const SystemConfig& sys, int accel_segment);

/// Largest inflated WCET among lower-priority segments sharing the bucket.
Duration same_bucket_blocking(const SystemConfig& sys, const InterferenceSets& sets, int accel_segment);

/// Least fixed point of the per-segment handling-time recurrence, or nullopt
/// once an iterate exceeds `cutoff`.
Bound segment_handling_time(const SystemConfig& sys, const InterferenceSets& sets, int accel_segment,
                            Duration cutoff);

/// Sum of segment_handling_time over the chain's segments; nullopt absorbs.
Bound chain_handling_per_segment(const SystemConfig& sys, const InterferenceSets& sets, int chain,
                                 Duration cutoff);

/// Per-chain handling time with higher-priority arrivals counted over a
/// response-time window. Each interfering segment in the union of the chain's
/// hps sets is counted once.
Duration chain_handling_per_chain(const SystemConfig& sys, const InterferenceSets& sets, int chain,
                                  Duration response_candidate);

/// Sum of per-request overhead over the chain's accelerator segments.
Duration chain_overhead(const SystemConfig& sys, const InterferenceSets& sets, int chain);

/// min of the two handling bounds, plus overhead. `per_segment` is the
/// (response-independent) result of chain_handling_per_segment.
HandlingBounds effective_handling(const SystemConfig& sys, const InterferenceSets& sets, int chain,
                                  Duration response_candidate, Bound per_segment);

/// Longest CPU WCET of a single callback among lower-priority chains of the
/// same executor; zero if there is none.
Duration blocking_term(const SystemConfig& sys, const InterferenceSets& sets, int chain);

/// Response-time recurrence for one chain. Every chain in hp and hpp must
/// already be analyzed in `partial` (std::logic_error otherwise).
ChainAnalysis chain_wcrt(const SystemConfig& sys, const InterferenceSets& sets, int chain,
                         const AnalysisReport& partial);

/// Full analysis in dependency order.
AnalysisReport analyze(const SystemConfig& sys);

/// Sum of sub-chain response times plus comm_cost per executor boundary.
/// Throws std::invalid_argument on an empty list.
Bound end_to_end_wcrt(std::span<const Bound> sub_chain_responses, Duration comm_cost);

struct AdmissionResult {
    bool accepted = false;
    std::string reason;
    std::string failing_chain;  // empty when accepted or rejected by validation
    AnalysisReport report;      // analysis of base + candidate when it validated
};

/// Re-validates and re-analyzes base + candidate. Accepts iff every CRITICAL
/// chain, old and new, meets its deadline; otherwise names the first failing
/// chain in priority order.
AdmissionResult admission_test(const SystemSpec& base, const Candidate& candidate);

}  // namespace paam
