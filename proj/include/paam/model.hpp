#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "paam/time.hpp"

namespace paam {

enum class SegmentKind { Cpu, Accel };
enum class Criticality { Critical, BestEffort };
enum class WaitPolicy { Spin, Suspend };

/// Worst-case per-request server overhead (client submit to server enqueue).
inline constexpr Duration kDefaultEpsilon = Duration::us(391);
/// Worst-case device preemption cost, charged before and after a segment.
inline constexpr Duration kDefaultKappa = Duration::us(130);
/// Communication cost between sub-chains of an end-to-end chain.
inline constexpr Duration kDefaultCommCost = Duration::us(100);

// ---------------------------------------------------------------------------
// Raw (unvalidated) system description, as read from a config document.
// ---------------------------------------------------------------------------

struct SegmentSpec {
    SegmentKind kind = SegmentKind::Cpu;
    Duration wcet;
    std::string accelerator;  // empty for CPU segments
};

struct CallbackSpec {
    std::string id;
    std::vector<SegmentSpec> segments;
};

struct ChainSpec {
    std::string id;
    std::vector<std::string> callbacks;
    Duration period;
    Duration deadline;
    int priority = 0;
    Criticality criticality = Criticality::Critical;
};

struct ExecutorSpec {
    std::string id;
    std::vector<std::string> callbacks;
    int core = 0;
    int priority = 0;
    WaitPolicy wait = WaitPolicy::Spin;
};

struct AcceleratorSpec {
    std::string id;
    int units = 1;
    int buckets = 1;
    Duration epsilon = kDefaultEpsilon;
    Duration kappa = kDefaultKappa;
    int server_core = 0;
    // Lowest-bucket concurrent kernels (simulation only, off by default).
    bool concurrent_lowest_bucket = false;
    int slowdown_permille = 1500;
};

/// A processing chain that spans several executors, analyzed as the sum of
/// its sub-chains plus a communication cost per executor boundary.
struct EndToEndSpec {
    std::string id;
    std::vector<std::string> sub_chains;
    Duration comm_cost = kDefaultCommCost;
};

struct SystemSpec {
    int cores = 0;
    std::vector<AcceleratorSpec> accelerators;
    std::vector<ExecutorSpec> executors;
    std::vector<CallbackSpec> callbacks;
    std::vector<ChainSpec> chains;
    std::vector<EndToEndSpec> end_to_end;
};

/// Additions proposed for admission: new entities plus callbacks to attach
/// to executors that already exist in the base system.
struct Candidate {
    SystemSpec additions;  // `cores` is ignored
    struct Attachment {
        std::string executor;
        std::vector<std::string> callbacks;
    };
    std::vector<Attachment> attachments;
};

/// Base spec with the candidate's entities appended. Throws ValidationError
/// when an attachment names an unknown executor.
SystemSpec merge_candidate(const SystemSpec& base, const Candidate& candidate);

/// Semantic configuration error. `path` is a JSON pointer into the config
/// document (e.g. "/chains/1/priority") so front ends can anchor the message.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string path, const std::string& what)
        : std::runtime_error(what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// ---------------------------------------------------------------------------
// Validated system with derived parameters. Indices refer into the vectors
// of the same SystemConfig.
// ---------------------------------------------------------------------------

struct Segment {
    SegmentKind kind = SegmentKind::Cpu;
    Duration wcet;
    int accelerator = -1;
};

struct Callback {
    std::string id;
    std::vector<Segment> segments;
    Duration cpu_wcet;            // E_i
    Duration accel_wcet;          // A_i
    int accel_segments = 0;       // eta_i
    std::vector<int> accelerators;  // r_i, sorted, unique
    int chain = -1;
    int executor = -1;
};

struct Chain {
    std::string id;
    std::vector<int> callbacks;
    Duration period;
    Duration deadline;
    int priority = 0;
    Criticality criticality = Criticality::Critical;
    int accel_segments = 0;  // delta_c
    Duration exec_sum;       // sum of E_i over the chain
    int executor = -1;
};

struct Executor {
    std::string id;
    std::vector<int> callbacks;
    int core = 0;
    int priority = 0;
    WaitPolicy wait = WaitPolicy::Spin;
};

struct Accelerator {
    std::string id;
    int units = 1;
    int buckets = 1;
    bool bucket_preemptive = false;
    Duration epsilon;
    Duration kappa;
    int server_core = 0;
    bool concurrent_lowest_bucket = false;
    int slowdown_permille = 1500;
};

/// One accelerator segment with its placement.
struct AccelSegment {
    int chain = -1;
    int callback = -1;
    int segment = -1;  // index into Callback::segments
    int accelerator = -1;
    int unit = 0;
    int bucket = 0;
    Duration wcet;
};

struct EndToEnd {
    std::string id;
    std::vector<int> sub_chains;
    Duration comm_cost;
};

struct SystemConfig {
    int cores = 0;
    std::vector<Accelerator> accelerators;
    std::vector<Executor> executors;
    std::vector<Callback> callbacks;
    std::vector<Chain> chains;
    std::vector<EndToEnd> end_to_end;
    /// (chain, accelerator) -> bucket, -1 when the chain does not use it.
    std::vector<std::vector<int>> bucket_map;
    /// Every accelerator segment of the system, ordered by chain, callback,
    /// segment position; carries the unit_map and bucket of each.
    std::vector<AccelSegment> accel_segments;
    /// The spec this config was validated from (kept for serialization).
    SystemSpec source;

    int bucket_of(int chain, int accelerator) const { return bucket_map[chain][accelerator]; }
    int find_chain(std::string_view id) const;
    int find_callback(std::string_view id) const;
    int find_executor(std::string_view id) const;
    int find_accelerator(std::string_view id) const;
    /// Chain indices sorted by priority, highest first.
    std::vector<int> chains_by_priority() const;
};

/// Validates a raw spec and derives every computed field, including the
/// bucket map (priority downsampling) and the unit map (worst-fit decreasing).
/// Throws ValidationError.
SystemConfig validate_system(const SystemSpec& spec);

/// Bucket index per input priority. Priorities are grouped, highest first,
/// into groups of ceil(m / n); the first group lands in bucket n-1, the next
/// in n-2, and so on. A short final group ends up in the lowest used bucket.
std::vector<int> assign_buckets(std::span<const int> priorities, int buckets);

/// Worst-fit decreasing: items sorted by utilization (descending, stable on
/// input order) are each placed on the least-loaded unit, ties to the lowest
/// unit index. Returns the unit per input item.
std::vector<int> assign_accelerator_units(std::span<const double> utilizations, int units);

std::string_view to_string(SegmentKind k);
std::string_view to_string(Criticality c);
std::string_view to_string(WaitPolicy w);

}  // namespace paam
