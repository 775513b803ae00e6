// Experiment orchestration: single runs, parameter sweeps and
// coverage-targeted tuning of a protocol's forwarding parameter.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "gossipsim/config.hpp"
#include "gossipsim/engine.hpp"
#include "gossipsim/metrics.hpp"
#include "gossipsim/rng.hpp"

namespace gossipsim {

using RecordSink = std::function<void(std::uint64_t epoch, const EpochRecord&)>;

inline AggregateMetrics run_experiment(const ExperimentConfig& cfg, const RecordSink& sink = {}) {
    cfg.validate();
    Simulation sim(build_graph(cfg), cfg.protocol, cfg.engine_params(), cfg.dynamics_params(),
                   cfg.seed);
    return run_epochs(sim, cfg.epochs, sink);
}

/// Same configuration with Broadcast as the protocol.
inline ExperimentConfig broadcast_baseline(ExperimentConfig cfg) {
    cfg.protocol = ProtocolSpec::broadcast();
    cfg.max_steps.reset();
    return cfg;
}

/// The protocol's main parameter, for reporting.
inline std::optional<double> protocol_param(const ProtocolSpec& p) {
    switch (p.kind) {
        case ProtocolKind::Dandelion: return p.stem_steps;
        case ProtocolKind::DandelionPP: return p.relayer_fraction;
        default: return p.tunable();
    }
}

// Runs `count` independent jobs, optionally on several threads. Results land
// at their index, so output order never depends on scheduling.
template <class Job>
void run_indexed(std::size_t count, unsigned jobs, Job&& job) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::mutex m;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(m);
                if (next >= count) return;
                i = next++;
            }
            job(i);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(jobs, count); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

struct SweepPoint {
    double value = 0.0;
    std::size_t replication = 0;
    ExperimentConfig config;
    AggregateMetrics metrics;
};

/// seed xor mix(value bits, replication).
inline std::uint64_t sweep_seed(std::uint64_t base, double value, std::size_t replication) {
    return base ^ mix64(std::bit_cast<std::uint64_t>(value) ^ mix64(replication + 1));
}

inline ExperimentConfig with_axis(const ExperimentConfig& base, std::string_view axis, double value) {
    if (!is_sweepable(axis)) throw ConfigError("axis '" + std::string(axis) + "' is not sweepable");
    const auto* info = detail::find_key(axis);
    if (info->scope == detail::KeyScope::Protocol && !detail::protocol_reads(base.protocol.kind, axis))
        throw ConfigError("axis '" + std::string(axis) + "' is not used by protocol " +
                          std::string(to_string(base.protocol.kind)));
    if (info->scope == detail::KeyScope::Hub && base.topology != Topology::Hierarchical)
        throw ConfigError("axis '" + std::string(axis) + "' requires topology=hierarchical");
    ExperimentConfig c = base;
    set_field(c, axis, detail::format_double(value));
    c.validate();
    return c;
}

/// One aggregate per (value, replication), ordered by value then
/// replication.
inline std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, std::string_view axis,
                                         const std::vector<double>& values,
                                         std::size_t replications, unsigned jobs = 1) {
    if (replications < 1) throw ConfigError("replications must be at least 1");
    std::vector<SweepPoint> points;
    for (double v : values) {
        for (std::size_t r = 0; r < replications; ++r) {
            SweepPoint pt;
            pt.value = v;
            pt.replication = r;
            pt.config = with_axis(base, axis, v);
            pt.config.seed = sweep_seed(base.seed, v, r);
            points.push_back(std::move(pt));
        }
    }
    run_indexed(points.size(), jobs,
                [&](std::size_t i) { points[i].metrics = run_experiment(points[i].config); });
    return points;
}

// ---------------------------------------------------------------------------
// Coverage-targeted tuning

/// Candidate values of the protocol's tunable, ordered from the least to the
/// most forwarding (coverage is assumed non-decreasing along the grid).
inline std::vector<double> default_tuning_grid(const ProtocolSpec& spec) {
    std::vector<double> grid;
    switch (spec.kind) {
        case ProtocolKind::ProbabilisticBroadcast:
        case ProtocolKind::FixedProbability:
            for (int p = 0; p <= 100; p += 2) grid.push_back(p);
            break;
        case ProtocolKind::FixedFanout:
            for (int n = 1; n <= 64; ++n) grid.push_back(n);
            break;
        case ProtocolKind::DegreeDependent:
            if (spec.ddf_mode == DdfMode::Exp) {
                // Larger X forwards less; X = 0 forwards always.
                for (double x = 4.0; x > 0.005; x /= 1.05) grid.push_back(x);
                grid.push_back(0.0);
            } else {
                // Probability ln D / ln X: larger X forwards less.
                for (double lx = 40.0; lx > 0.05; lx /= 1.05) grid.push_back(std::exp(lx));
            }
            break;
        default: break;
    }
    return grid;
}

inline void set_tunable(ProtocolSpec& spec, double value) {
    switch (spec.kind) {
        case ProtocolKind::ProbabilisticBroadcast:
        case ProtocolKind::FixedProbability: spec.p = value; break;
        case ProtocolKind::FixedFanout: spec.fanout = static_cast<std::uint32_t>(value); break;
        case ProtocolKind::DegreeDependent: spec.ddf_x = value; break;
        default: throw ConfigError("protocol has no tunable parameter");
    }
}

struct TuneProbe {
    double value = 0.0;
    AggregateMetrics metrics;
};

struct TuneResult {
    std::optional<double> value;  // nullopt when the protocol has no tunable
    ExperimentConfig config;
    AggregateMetrics metrics;
    std::vector<TuneProbe> probes;  // in probing order
};

class TuneError : public std::runtime_error {
public:
    TuneError(const std::string& what, TuneResult best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const TuneResult& best() const noexcept { return best_; }

private:
    TuneResult best_;
};

/// Seed for probing a grid value; identical for repeated probes of it.
inline std::uint64_t probe_seed(std::uint64_t base, double value) {
    return base ^ mix64(std::bit_cast<std::uint64_t>(value) + 0x5851F42D4C957F2DULL);
}

/// Measured probes keyed by grid value. Probe seeds depend only on the base
/// seed and the value, so one cache can serve several targets of one base.
using ProbeCache = std::map<double, AggregateMetrics>;

/// Smallest-forwarding grid value whose measured success rate reaches
/// target - tolerance, by bisection over the grid.
inline TuneResult tune_parameter(const ExperimentConfig& base, double target_coverage,
                                 double tolerance, std::vector<double> grid = {},
                                 ProbeCache* cache = nullptr) {
    base.validate();
    TuneResult result;
    if (!base.protocol.tunable()) {
        result.config = base;
        result.metrics = run_experiment(base);
        if (result.metrics.success_rate() < target_coverage - tolerance)
            throw TuneError("target coverage unattainable", result);
        return result;
    }
    if (grid.empty()) grid = default_tuning_grid(base.protocol);
    if (grid.empty()) throw ConfigError("empty tuning grid");

    const double threshold = target_coverage - tolerance;
    auto probe = [&](std::size_t i) {
        ExperimentConfig c = base;
        set_tunable(c.protocol, grid[i]);
        c.seed = probe_seed(base.seed, grid[i]);
        c.validate();
        AggregateMetrics m;
        if (cache && cache->count(grid[i])) {
            m = cache->at(grid[i]);
        } else {
            m = run_experiment(c);
            if (cache) cache->emplace(grid[i], m);
        }
        result.probes.push_back({grid[i], m});
        return std::pair{c, m};
    };

    auto [top_cfg, top_metrics] = probe(grid.size() - 1);
    if (top_metrics.success_rate() < threshold) {
        result.value = grid.back();
        result.config = top_cfg;
        result.metrics = top_metrics;
        throw TuneError("target coverage unattainable on the grid", result);
    }
    std::ptrdiff_t lo = -1;  // known miss (or none)
    std::size_t hi = grid.size() - 1;
    ExperimentConfig hi_cfg = top_cfg;
    AggregateMetrics hi_metrics = top_metrics;
    while (static_cast<std::ptrdiff_t>(hi) - lo > 1) {
        std::size_t mid = static_cast<std::size_t>(lo + (static_cast<std::ptrdiff_t>(hi) - lo) / 2);
        auto [cfg, m] = probe(mid);
        if (m.success_rate() >= threshold) {
            hi = mid;
            hi_cfg = cfg;
            hi_metrics = m;
        } else {
            lo = static_cast<std::ptrdiff_t>(mid);
        }
    }
    result.value = grid[hi];
    result.config = hi_cfg;
    result.metrics = hi_metrics;
    return result;
}

}  // namespace gossipsim
