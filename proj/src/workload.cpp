#include "paam/workload.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

#include "paam/analysis.hpp"
#include "paam/config_io.hpp"

namespace paam {

Ratio parse_ratio(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("ratio must look like a:b, got '" + std::string(text) + "'");
    auto part = [&](std::string_view s) {
        int v = -1;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || v < 0) {
            throw std::invalid_argument("bad ratio component '" + std::string(s) + "'");
        }
        return v;
    };
    Ratio r{part(text.substr(0, colon)), part(text.substr(colon + 1))};
    if (r.accel + r.cpu == 0) throw std::invalid_argument("ratio 0:0 has no utilization to split");
    return r;
}

std::string to_string(const Ratio& r) { return std::to_string(r.accel) + ":" + std::to_string(r.cpu); }

std::string_view to_string(UtilMode m) { return m == UtilMode::PerChain ? "per_chain" : "uunifast_total"; }

void validate_params(const GenParams& p) {
    if (p.chains < 1) throw std::invalid_argument("chain count must be >= 1");
    if (p.callbacks_per_chain < 1) throw std::invalid_argument("callbacks per chain must be >= 1");
    if (!(p.utilization > 0.0) || p.utilization > (p.util_mode == UtilMode::PerChain ? 1.0 : double(p.chains))) {
        throw std::invalid_argument("utilization out of range");
    }
    if (p.ratio.accel < 0 || p.ratio.cpu < 0 || p.ratio.accel + p.ratio.cpu == 0) {
        throw std::invalid_argument("ratio components must be non-negative and not both zero");
    }
    if (p.period_min <= Duration::zero() || p.period_max < p.period_min) throw std::invalid_argument("bad period range");
    if (p.buckets < 1) throw std::invalid_argument("bucket count must be >= 1");
    if (p.cores < 1) throw std::invalid_argument("core count must be >= 1");
    if (p.accelerator_units < 1) throw std::invalid_argument("accelerator units must be >= 1");
    if (p.epsilon < Duration::zero() || p.kappa < Duration::zero()) throw std::invalid_argument("negative overhead");
}

GenParams gen_params_from_json(std::string_view text, const GenParams& defaults) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("generator parameters: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("generator parameters must be a JSON object");
    GenParams p = defaults;
    for (const auto& [key, v] : doc.items()) {
        try {
            if (key == "chains") p.chains = v.get<int>();
            else if (key == "callbacks_per_chain") p.callbacks_per_chain = v.get<int>();
            else if (key == "utilization") p.utilization = v.get<double>();
            else if (key == "ratio") p.ratio = parse_ratio(v.get<std::string>());
            else if (key == "period_min") p.period_min = duration_from_json(v, TimeUnit::Ns, "/" + key);
            else if (key == "period_max") p.period_max = duration_from_json(v, TimeUnit::Ns, "/" + key);
            else if (key == "buckets") p.buckets = v.get<int>();
            else if (key == "cores") p.cores = v.get<int>();
            else if (key == "accelerator_units") p.accelerator_units = v.get<int>();
            else if (key == "epsilon") p.epsilon = duration_from_json(v, TimeUnit::Ns, "/" + key);
            else if (key == "kappa") p.kappa = duration_from_json(v, TimeUnit::Ns, "/" + key);
            else if (key == "seed") p.seed = v.get<std::uint64_t>();
            else if (key == "wait") {
                const auto w = v.get<std::string>();
                if (w != "spin" && w != "suspend") throw std::invalid_argument("wait must be spin or suspend");
                p.wait = w == "spin" ? WaitPolicy::Spin : WaitPolicy::Suspend;
            } else if (key == "util_mode") {
                const auto m = v.get<std::string>();
                if (m == "per_chain") p.util_mode = UtilMode::PerChain;
                else if (m == "uunifast_total" || m == "uunifast") p.util_mode = UtilMode::UUniFastTotal;
                else throw std::invalid_argument("util_mode must be per_chain or uunifast_total");
            } else {
                throw std::invalid_argument("unknown key");
            }
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("generator parameter '" + key + "': " + e.what());
        } catch (const std::exception& e) {
            throw std::invalid_argument("generator parameter '" + key + "': " + e.what());
        }
    }
    validate_params(p);
    return p;
}

namespace {

double unit_real(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> uunifast(std::mt19937_64& rng, int n, double total) {
    std::vector<double> u(static_cast<std::size_t>(n));
    double rest = total;
    for (int i = 0; i < n - 1; ++i) {
        const double next = rest * std::pow(unit_real(rng), 1.0 / static_cast<double>(n - i - 1));
        u[i] = rest - next;
        rest = next;
    }
    u[n - 1] = rest;
    return u;
}

// Split `total` ns into `k` shares differing by at most 1ns.
std::int64_t share(std::int64_t total, int k, int i) { return total / k + (i < total % k ? 1 : 0); }

}  // namespace

SystemSpec generate_spec(const GenParams& p) {
    validate_params(p);
    std::mt19937_64 rng(p.seed);
    const int m = p.chains;
    const int k = p.callbacks_per_chain;

    std::vector<Duration> periods;
    const double lo = std::log(static_cast<double>(p.period_min.count()));
    const double hi = std::log(static_cast<double>(p.period_max.count()));
    for (int c = 0; c < m; ++c) {
        const double t = std::exp(lo + unit_real(rng) * (hi - lo));
        auto us = std::llround(t / 1000.0) * 1000;
        periods.push_back(std::clamp(Duration(us), p.period_min, p.period_max));
    }
    const std::int64_t parts = p.ratio.accel + p.ratio.cpu;
    auto budget_of = [&](double u, Duration period) { return std::llround(u * static_cast<double>(period.count())); };
    // smallest budget whose split leaves every segment at least 1ns
    auto fits = [&](std::int64_t budget) {
        const std::int64_t cpu_total = budget * p.ratio.cpu / parts;
        const std::int64_t accel_total = budget - cpu_total;
        if (p.ratio.accel > 0 && accel_total < k) return false;
        if (p.ratio.cpu > 0 && cpu_total < (p.ratio.accel > 0 ? 2 : 1) * k) return false;
        return true;
    };
    std::vector<double> utils(static_cast<std::size_t>(m), p.utilization);
    if (p.util_mode == UtilMode::UUniFastTotal) {
        // UUniFast-discard: redraw splits that starve a chain below 1ns segments
        for (int attempt = 0;; ++attempt) {
            utils = uunifast(rng, m, p.utilization);
            bool ok = true;
            for (int c = 0; c < m; ++c) ok = ok && fits(budget_of(utils[c], periods[c]));
            if (ok) break;
            if (attempt == 1000) throw std::invalid_argument("total utilization too small to split over the chains");
        }
    }
    std::vector<int> prio(static_cast<std::size_t>(m));
    std::iota(prio.begin(), prio.end(), 1);
    for (int i = m - 1; i > 0; --i) std::swap(prio[i], prio[rng() % static_cast<std::uint64_t>(i + 1)]);

    SystemSpec spec;
    spec.cores = p.cores + 1;
    AcceleratorSpec acc;
    acc.id = "acc0";
    acc.units = p.accelerator_units;
    acc.buckets = p.buckets;
    acc.epsilon = p.epsilon;
    acc.kappa = p.kappa;
    acc.server_core = p.cores;
    spec.accelerators.push_back(acc);

    std::vector<double> cpu_util(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
        const std::int64_t budget = budget_of(utils[c], periods[c]);
        const std::int64_t cpu_total = budget * p.ratio.cpu / parts;
        const std::int64_t accel_total = budget - cpu_total;
        cpu_util[c] = static_cast<double>(cpu_total) / static_cast<double>(periods[c].count());

        ChainSpec ch;
        ch.id = "c" + std::to_string(c);
        ch.period = periods[c];
        ch.deadline = periods[c];
        ch.priority = prio[c];
        for (int i = 0; i < k; ++i) {
            CallbackSpec cb;
            cb.id = ch.id + "_cb" + std::to_string(i);
            const std::int64_t cpu = p.ratio.cpu > 0 ? share(cpu_total, k, i) : 0;
            const std::int64_t accel = p.ratio.accel > 0 ? share(accel_total, k, i) : 0;
            if ((p.ratio.accel > 0 && accel < 1) || (p.ratio.cpu > 0 && cpu < (p.ratio.accel > 0 ? 2 : 1))) {
                throw std::invalid_argument("utilization budget of chain " + ch.id + " leaves a segment below 1ns");
            }
            if (accel == 0) {
                cb.segments.push_back({SegmentKind::Cpu, Duration(cpu), ""});
            } else if (cpu == 0) {
                cb.segments.push_back({SegmentKind::Accel, Duration(accel), acc.id});
            } else {
                cb.segments.push_back({SegmentKind::Cpu, Duration(cpu / 2), ""});
                cb.segments.push_back({SegmentKind::Accel, Duration(accel), acc.id});
                cb.segments.push_back({SegmentKind::Cpu, Duration(cpu - cpu / 2), ""});
            }
            ch.callbacks.push_back(cb.id);
            spec.callbacks.push_back(std::move(cb));
        }
        spec.chains.push_back(std::move(ch));
    }

    // worst-fit decreasing on CPU utilization
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return cpu_util[a] > cpu_util[b]; });
    std::vector<double> load(static_cast<std::size_t>(p.cores), 0.0);
    std::vector<int> core_of(static_cast<std::size_t>(m));
    for (int c : order) {
        const auto best = std::min_element(load.begin(), load.end()) - load.begin();
        core_of[c] = static_cast<int>(best);
        load[best] += cpu_util[c];
    }
    for (int c = 0; c < m; ++c) {
        ExecutorSpec ex;
        ex.id = "x" + std::to_string(c);
        ex.callbacks = spec.chains[c].callbacks;
        ex.core = core_of[c];
        ex.priority = spec.chains[c].priority;
        ex.wait = p.wait;
        spec.executors.push_back(std::move(ex));
    }
    return spec;
}

SystemConfig generate_chainset(const GenParams& p) { return validate_system(generate_spec(p)); }

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over base and index
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double schedulability_ratio(const GenParams& p, int trials, int threads) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    validate_params(p);
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, trials);

    std::vector<char> ok(static_cast<std::size_t>(trials), 0);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (int i = next++; i < trials && !failed; i = next++) {
            try {
                GenParams q = p;
                q.seed = trial_seed(p.seed, static_cast<std::uint64_t>(i));
                ok[i] = analyze(generate_chainset(q)).schedulable ? 1 : 0;
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    const auto passed = std::count(ok.begin(), ok.end(), 1);
    return static_cast<double>(passed) / static_cast<double>(trials);
}

}  // namespace paam
