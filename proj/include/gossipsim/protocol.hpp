// Forwarding rules for the dissemination algorithms.
//
// Everything here is a pure decision over (spec, graph view, node state,
// rng): the engine owns message queues and bookkeeping and asks these
// functions which neighbors receive the next hop.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gossipsim/rng.hpp"
#include "gossipsim/temporal_graph.hpp"
#include "gossipsim/types.hpp"

namespace gossipsim {

enum class ProtocolKind {
    Broadcast,
    ProbabilisticBroadcast,
    FixedProbability,
    FixedFanout,
    DegreeDependent,
    Dandelion,
    DandelionPP,
};

enum class DdfMode { Log, Exp };
enum class Phase : std::uint8_t { Stem, Fluff };
enum class Role { Relayer, Diffuser };

inline std::string_view to_string(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::Broadcast: return "Broadcast";
        case ProtocolKind::ProbabilisticBroadcast: return "ProbabilisticBroadcast";
        case ProtocolKind::FixedProbability: return "FixedProbability";
        case ProtocolKind::FixedFanout: return "FixedFanout";
        case ProtocolKind::DegreeDependent: return "DegreeDependent";
        case ProtocolKind::Dandelion: return "Dandelion";
        case ProtocolKind::DandelionPP: return "DandelionPP";
    }
    return "?";
}

inline std::string_view to_string(DdfMode m) { return m == DdfMode::Log ? "log" : "exp"; }

inline std::optional<ProtocolKind> parse_protocol_kind(std::string_view s) {
    std::string key;
    for (char c : s)
        if (c != '-' && c != '_' && c != ' ') key.push_back(static_cast<char>(std::tolower(c)));
    if (key == "broadcast") return ProtocolKind::Broadcast;
    if (key == "probabilisticbroadcast" || key == "pb") return ProtocolKind::ProbabilisticBroadcast;
    if (key == "fixedprobability" || key == "fp") return ProtocolKind::FixedProbability;
    if (key == "fixedfanout" || key == "ffan" || key == "fanout") return ProtocolKind::FixedFanout;
    if (key == "degreedependent" || key == "ddf") return ProtocolKind::DegreeDependent;
    if (key == "dandelion") return ProtocolKind::Dandelion;
    if (key == "dandelionpp" || key == "dandelion++" || key == "d++")
        return ProtocolKind::DandelionPP;
    return std::nullopt;
}

inline std::optional<DdfMode> parse_ddf_mode(std::string_view s) {
    if (s == "log" || s == "Log") return DdfMode::Log;
    if (s == "exp" || s == "Exp") return DdfMode::Exp;
    return std::nullopt;
}

struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::Broadcast;
    double p = 100.0;                // percent, PB and FP
    std::uint32_t fanout = 1;        // F-FAN
    double ddf_x = 0.25;             // DDF parameter X
    DdfMode ddf_mode = DdfMode::Exp;
    std::uint32_t stem_steps = 4;    // Dandelion: single-target hops before fluff
    double relayer_fraction = 0.8;   // Dandelion++
    Timestep role_epoch_len = 100;   // Dandelion++
    std::optional<Timestep> failsafe_timeout;
    bool failsafe_enabled = false;

    static ProtocolSpec broadcast() { return {}; }
    static ProtocolSpec probabilistic_broadcast(double p) {
        ProtocolSpec s;
        s.kind = ProtocolKind::ProbabilisticBroadcast;
        s.p = p;
        return s;
    }
    static ProtocolSpec fixed_probability(double p) {
        ProtocolSpec s;
        s.kind = ProtocolKind::FixedProbability;
        s.p = p;
        return s;
    }
    static ProtocolSpec fixed_fanout(std::uint32_t n) {
        ProtocolSpec s;
        s.kind = ProtocolKind::FixedFanout;
        s.fanout = n;
        return s;
    }
    static ProtocolSpec degree_dependent(double x, DdfMode mode) {
        ProtocolSpec s;
        s.kind = ProtocolKind::DegreeDependent;
        s.ddf_x = x;
        s.ddf_mode = mode;
        return s;
    }
    static ProtocolSpec dandelion(std::uint32_t stem_steps, bool failsafe = false) {
        ProtocolSpec s;
        s.kind = ProtocolKind::Dandelion;
        s.stem_steps = stem_steps;
        s.failsafe_enabled = failsafe;
        return s;
    }
    static ProtocolSpec dandelion_pp(double relayer_fraction, bool failsafe = true) {
        ProtocolSpec s;
        s.kind = ProtocolKind::DandelionPP;
        s.relayer_fraction = relayer_fraction;
        s.failsafe_enabled = failsafe;
        return s;
    }

    bool uses_stem() const {
        return kind == ProtocolKind::Dandelion || kind == ProtocolKind::DandelionPP;
    }

    /// Timesteps a stem relayer waits for a fluff copy before fluffing itself.
    Timestep effective_failsafe_timeout() const {
        if (failsafe_timeout) return *failsafe_timeout;
        if (kind == ProtocolKind::DandelionPP) return 2 * role_epoch_len;
        return Timestep{2} * stem_steps + 5;
    }

    void validate() const {
        switch (kind) {
            case ProtocolKind::Broadcast: break;
            case ProtocolKind::ProbabilisticBroadcast:
            case ProtocolKind::FixedProbability:
                if (!(p >= 0.0 && p <= 100.0)) throw InvalidArgument("p must lie in [0,100]");
                break;
            case ProtocolKind::FixedFanout:
                if (fanout < 1) throw InvalidArgument("fanout must be at least 1");
                break;
            case ProtocolKind::DegreeDependent:
                if (ddf_mode == DdfMode::Log && !(ddf_x > 1.0))
                    throw InvalidArgument("log-mode DDF requires ddf_x > 1");
                if (ddf_mode == DdfMode::Exp && !(ddf_x >= 0.0))
                    throw InvalidArgument("exp-mode DDF requires ddf_x >= 0");
                if (!std::isfinite(ddf_x)) throw InvalidArgument("ddf_x must be finite");
                break;
            case ProtocolKind::Dandelion:
                if (failsafe_timeout && *failsafe_timeout == 0)
                    throw InvalidArgument("failsafe_timeout must be positive");
                break;
            case ProtocolKind::DandelionPP:
                if (!(relayer_fraction >= 0.0 && relayer_fraction <= 1.0))
                    throw InvalidArgument("relayer_fraction must lie in [0,1]");
                if (role_epoch_len < 1) throw InvalidArgument("role_epoch_len must be positive");
                if (failsafe_timeout && *failsafe_timeout == 0)
                    throw InvalidArgument("failsafe_timeout must be positive");
                break;
        }
    }

    /// The scalar a coverage tuner adjusts, if any.
    std::optional<double> tunable() const {
        switch (kind) {
            case ProtocolKind::ProbabilisticBroadcast:
            case ProtocolKind::FixedProbability: return p;
            case ProtocolKind::FixedFanout: return fanout;
            case ProtocolKind::DegreeDependent: return ddf_x;
            default: return std::nullopt;
        }
    }
};

struct MessageEnvelope {
    MessageId msg_id = 0;
    NodeId origin = kNoNode;
    NodeId target = kNoNode;  // holder; only the engine reads it
    NodeId sender = kNoNode;
    NodeId receiver = kNoNode;
    std::uint32_t ttl_remaining = 0;
    std::uint32_t stem_hops_remaining = 0;
    Timestep deliver_at = 0;
    Phase phase = Phase::Fluff;
    bool via_failsafe = false;  // descends from a fail-safe re-broadcast
};

// Per-node protocol cache. Sizes stay tiny: the engine clears it every epoch.
struct NodeProtocolState {
    std::vector<MessageId> seen;
    std::vector<MessageId> fluff_seen;
    std::vector<std::pair<MessageId, Timestep>> stem_relayed;

    bool has_seen(MessageId id) const { return contains(seen, id); }
    bool has_seen_fluff(MessageId id) const { return contains(fluff_seen, id); }
    void mark_seen(MessageId id) {
        if (!has_seen(id)) seen.push_back(id);
    }
    void mark_fluff_seen(MessageId id) {
        if (!has_seen_fluff(id)) fluff_seen.push_back(id);
    }
    void record_stem_relay(MessageId id, Timestep at) {
        for (auto& [m, t] : stem_relayed)
            if (m == id) return;
        stem_relayed.emplace_back(id, at);
    }
    std::optional<Timestep> stem_relayed_at(MessageId id) const {
        for (const auto& [m, t] : stem_relayed)
            if (m == id) return t;
        return std::nullopt;
    }
    void clear() {
        seen.clear();
        fluff_seen.clear();
        stem_relayed.clear();
    }

private:
    static bool contains(const std::vector<MessageId>& v, MessageId id) {
        return std::find(v.begin(), v.end(), id) != v.end();
    }
};

// Result of a forwarding decision; targets are written to a caller buffer.
struct Forwarding {
    Phase phase = Phase::Fluff;
    std::uint32_t stem_hops_remaining = 0;
    std::size_t degree_queries = 0;
};

/// Forwarding probability toward a neighbor of degree `degree`:
/// always 1 below degree 3, otherwise 1/log_degree(x) (Log) or 1/degree^x
/// (Exp), capped at 1.
inline double ddf_probability(std::size_t degree, double x, DdfMode mode) {
    if (degree < 3) return 1.0;
    const double d = static_cast<double>(degree);
    double q = mode == DdfMode::Log ? std::log(d) / std::log(x) : std::pow(d, -x);
    if (!(q > 0.0)) return 0.0;
    return std::min(1.0, q);
}

namespace detail {

// ddf_probability memoized per degree for the last (x, mode) seen on this
// thread; pow dominates DDF runs otherwise.
inline double ddf_probability_cached(std::size_t degree, double x, DdfMode mode) {
    constexpr std::size_t kMaxCached = 4096;
    thread_local double cached_x = std::numeric_limits<double>::quiet_NaN();
    thread_local DdfMode cached_mode = DdfMode::Exp;
    thread_local std::vector<double> table;
    if (degree >= kMaxCached) return ddf_probability(degree, x, mode);
    if (!(cached_x == x) || cached_mode != mode) {
        cached_x = x;
        cached_mode = mode;
        table.clear();
    }
    for (std::size_t d = table.size(); d <= degree; ++d) table.push_back(ddf_probability(d, x, mode));
    return table[degree];
}

}  // namespace detail

/// Seed-independent 64-bit mix of (node id, role epoch): two rounds of the
/// splitmix64 finalizer, the second keyed by the epoch.
constexpr std::uint64_t role_hash(NodeId node, std::uint64_t role_epoch) noexcept {
    return mix64(mix64(static_cast<std::uint64_t>(node)) ^ (role_epoch * 0xC2B2AE3D27D4EB4FULL));
}

/// Relayer iff the low 32 bits of role_hash, read as a fraction of 2^32,
/// fall below relayer_fraction.
inline Role dandelionpp_role(NodeId node, std::uint64_t role_epoch, double relayer_fraction) {
    const double u = static_cast<double>(role_hash(node, role_epoch) & 0xFFFFFFFFULL) /
                     4294967296.0;
    return u < relayer_fraction ? Role::Relayer : Role::Diffuser;
}

namespace detail {

inline void all_except(std::span<const NodeId> nbrs, NodeId exclude, std::vector<NodeId>& out) {
    for (NodeId v : nbrs)
        if (v != exclude) out.push_back(v);
}

// One uniform neighbor. The excluded node (the forwarder) is skipped unless
// it is the only neighbor.
inline void pick_one(std::span<const NodeId> nbrs, NodeId exclude, Rng& rng,
                     std::vector<NodeId>& out) {
    if (nbrs.empty()) return;
    if (nbrs.size() == 1) {
        out.push_back(nbrs[0]);
        return;
    }
    auto it = std::find(nbrs.begin(), nbrs.end(), exclude);
    if (it == nbrs.end()) {
        out.push_back(nbrs[uniform_index(rng, nbrs.size())]);
        return;
    }
    std::size_t skip = static_cast<std::size_t>(it - nbrs.begin());
    std::size_t i = uniform_index(rng, nbrs.size() - 1);
    out.push_back(nbrs[i >= skip ? i + 1 : i]);
}

inline Role role_at(const ProtocolSpec& spec, NodeId node, Timestep now) {
    return dandelionpp_role(node, now / spec.role_epoch_len, spec.relayer_fraction);
}

}  // namespace detail

/// Targets of the first hop from `origin`.
inline Forwarding origination_targets(const ProtocolSpec& spec, NodeId origin,
                                      const TemporalGraph& graph, Timestep now, Rng& rng,
                                      std::vector<NodeId>& out) {
    out.clear();
    auto nbrs = graph.neighbors(origin);
    Forwarding fwd;
    switch (spec.kind) {
        case ProtocolKind::Dandelion:
            if (spec.stem_steps == 0) break;
            fwd.phase = Phase::Stem;
            fwd.stem_hops_remaining = spec.stem_steps - 1;
            detail::pick_one(nbrs, kNoNode, rng, out);
            return fwd;
        case ProtocolKind::DandelionPP:
            if (detail::role_at(spec, origin, now) == Role::Diffuser) break;
            fwd.phase = Phase::Stem;
            detail::pick_one(nbrs, kNoNode, rng, out);
            return fwd;
        default: break;
    }
    out.assign(nbrs.begin(), nbrs.end());
    return fwd;
}

/// Targets for relaying `msg` from `node`. The caller has already filtered
/// duplicates (msg_id not in `state.seen`) and zero-TTL copies.
inline Forwarding forward_targets(const ProtocolSpec& spec, NodeId node,
                                  const MessageEnvelope& msg, const TemporalGraph& graph,
                                  const NodeProtocolState& state, Timestep now, Rng& rng,
                                  std::vector<NodeId>& out) {
    (void)state;
    out.clear();
    auto nbrs = graph.neighbors(node);
    const NodeId from = msg.sender;
    Forwarding fwd;
    switch (spec.kind) {
        case ProtocolKind::Broadcast:
            detail::all_except(nbrs, from, out);
            break;
        case ProtocolKind::ProbabilisticBroadcast:
            if (bernoulli(rng, spec.p / 100.0)) detail::all_except(nbrs, from, out);
            break;
        case ProtocolKind::FixedProbability: {
            const double q = spec.p / 100.0;
            for (NodeId v : nbrs)
                if (v != from && bernoulli(rng, q)) out.push_back(v);
            break;
        }
        case ProtocolKind::FixedFanout: {
            detail::all_except(nbrs, from, out);
            if (out.size() > spec.fanout) {
                for (std::size_t i = 0; i < spec.fanout; ++i)
                    std::swap(out[i], out[i + uniform_index(rng, out.size() - i)]);
                out.resize(spec.fanout);
            }
            break;
        }
        case ProtocolKind::DegreeDependent:
            for (NodeId v : nbrs) {
                if (v == from) continue;
                ++fwd.degree_queries;
                if (bernoulli(rng, detail::ddf_probability_cached(graph.degree(v), spec.ddf_x,
                                                                    spec.ddf_mode)))
                    out.push_back(v);
            }
            break;
        case ProtocolKind::Dandelion:
            if (msg.phase == Phase::Stem && msg.stem_hops_remaining > 0) {
                fwd.phase = Phase::Stem;
                fwd.stem_hops_remaining = msg.stem_hops_remaining - 1;
                detail::pick_one(nbrs, from, rng, out);
            } else {
                detail::all_except(nbrs, from, out);
            }
            break;
        case ProtocolKind::DandelionPP:
            if (msg.phase == Phase::Stem && detail::role_at(spec, node, now) == Role::Relayer) {
                fwd.phase = Phase::Stem;
                detail::pick_one(nbrs, from, rng, out);
            } else {
                detail::all_except(nbrs, from, out);
            }
            break;
    }
    return fwd;
}

/// True once `timeout` timesteps have passed since this node relayed the
/// message in stem phase without seeing a fluff copy come back.
inline bool failsafe_due(const NodeProtocolState& state, MessageId msg_id, Timestep now,
                         Timestep timeout) {
    auto relayed = state.stem_relayed_at(msg_id);
    if (!relayed || state.has_seen_fluff(msg_id)) return false;
    return now >= *relayed && now - *relayed >= timeout;
}

}  // namespace gossipsim
