#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "paam/model.hpp"

namespace paam {

/// Accelerator:CPU utilization split, e.g. 1:1 or 3:7.
struct Ratio {
    int accel = 1;
    int cpu = 1;

    bool operator==(const Ratio&) const = default;
};

/// Parses "a:b"; both non-negative, not both zero. Throws std::invalid_argument.
Ratio parse_ratio(std::string_view text);
std::string to_string(const Ratio& r);

enum class UtilMode {
    PerChain,       // every chain gets utilization U
    UUniFastTotal,  // U is the system total, spread over chains by UUniFast (splits that
                    // would leave a segment below 1ns are redrawn)
};

std::string_view to_string(UtilMode m);

struct GenParams {
    int chains = 4;
    int callbacks_per_chain = 4;
    double utilization = 0.2;
    Ratio ratio;
    Duration period_min = Duration::ms(10);
    Duration period_max = Duration::ms(1000);
    int buckets = 6;
    int cores = 4;  // client cores; the server gets one more
    int accelerator_units = 1;
    Duration epsilon = kDefaultEpsilon;
    Duration kappa = kDefaultKappa;
    WaitPolicy wait = WaitPolicy::Spin;
    UtilMode util_mode = UtilMode::PerChain;
    std::uint64_t seed = 1;
};

/// Throws std::invalid_argument on out-of-range parameters.
void validate_params(const GenParams& p);

/// Reads a JSON object with keys named like the GenParams fields, each
/// optional over `defaults`. Durations take the config duration syntax.
/// Throws std::invalid_argument on unknown keys or bad values.
GenParams gen_params_from_json(std::string_view text, const GenParams& defaults = {});

/// Random chainset: log-uniform periods (1us grid), D = T, budget U*T split
/// by the ratio and spread evenly over callbacks shaped [CPU, ACCEL, CPU];
/// random unique priorities; one executor per chain with process priority
/// equal to chain priority, placed worst-fit by CPU utilization; one
/// accelerator on a dedicated server core. Throws std::invalid_argument when
/// a segment would get less than 1ns.
SystemSpec generate_spec(const GenParams& p);
SystemConfig generate_chainset(const GenParams& p);

/// Seed of trial `index` derived from a base seed.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index);

/// Fraction of `trials` generated systems whose critical chains all pass the
/// analysis. Trial i uses trial_seed(p.seed, i). `threads` = 0 picks the
/// hardware concurrency; the result does not depend on it.
double schedulability_ratio(const GenParams& p, int trials, int threads = 0);

}  // namespace paam
