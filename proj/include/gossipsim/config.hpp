// Experiment configuration: flat `key=value` text with '#' comments.
//
// Unspecified keys take the reference setup: 10 000 peers, 80% active,
// p_activate 1%, p_deactivate 0.25%, 10 000 epochs, TTL 20, Broadcast.
// Protocol keys that the selected protocol does not read are rejected, as
// are hub keys on a random topology.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gossipsim/dynamics.hpp"
#include "gossipsim/engine.hpp"
#include "gossipsim/generators.hpp"
#include "gossipsim/protocol.hpp"
#include "gossipsim/types.hpp"

namespace gossipsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Topology { Random, Hierarchical };

inline std::string_view to_string(Topology t) {
    return t == Topology::Random ? "random" : "hierarchical";
}

struct ExperimentConfig {
    Topology topology = Topology::Random;
    std::size_t nodes = 10'000;
    double avg_degree = 15.0;
    double active_fraction = 0.8;
    std::optional<std::size_t> attach_count;
    double p_activate = 0.01;
    double p_deactivate = 0.0025;

    std::size_t hub_count = 80;
    std::size_t hub_degree_min = 250;
    std::size_t hub_degree_max = 300;
    std::size_t total_entries = 120'000;
    bool hub_churn = false;
    bool hub_refill = true;

    ProtocolSpec protocol;

    std::uint64_t epochs = 10'000;
    std::uint32_t ttl = 20;
    std::optional<Timestep> max_steps;
    std::uint64_t seed = 1;

    /// Peers a (re)joining node links to. Defaults to the mean degree the
    /// initial overlay gives a non-hub node.
    std::size_t effective_attach_count() const {
        if (attach_count) return *attach_count;
        if (topology == Topology::Random)
            return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(avg_degree)));
        const double active = std::round(static_cast<double>(nodes) * active_fraction);
        const double spokes = active - static_cast<double>(hub_count);
        const double hub_entries = 2.0 * static_cast<double>(hub_count) *
                                   0.5 * static_cast<double>(hub_degree_min + hub_degree_max);
        if (spokes <= 0.0) return 1;
        const double per_node = (static_cast<double>(total_entries) - hub_entries) / spokes;
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(per_node)));
    }

    /// Timestep budget per epoch. Protocols with a fail-safe need room for
    /// the timeout plus a full fresh dissemination.
    Timestep effective_max_steps() const {
        if (max_steps) return *max_steps;
        if (protocol.uses_stem() && protocol.failsafe_enabled)
            return std::max<Timestep>(Timestep{4} * ttl,
                                      protocol.effective_failsafe_timeout() + Timestep{2} * ttl);
        return ttl;
    }

    EngineParams engine_params() const { return {ttl, effective_max_steps()}; }

    DynamicsParams dynamics_params() const {
        DynamicsParams d;
        d.p_activate = p_activate;
        d.p_deactivate = p_deactivate;
        d.attach_count = effective_attach_count();
        d.hub_churn = hub_churn;
        d.hub_refill = hub_refill;
        return d;
    }

    HierarchicalParams hierarchical_params() const {
        HierarchicalParams h;
        h.n = nodes;
        h.hub_count = hub_count;
        h.hub_degree_min = hub_degree_min;
        h.hub_degree_max = hub_degree_max;
        h.total_directed_entries = total_entries;
        h.active_fraction = active_fraction;
        return h;
    }

    void validate() const {
        try {
            if (nodes < 2) throw InvalidArgument("nodes must be at least 2");
            if (!(active_fraction > 0.0 && active_fraction <= 1.0))
                throw InvalidArgument("active_fraction must lie in (0,1]");
            const double n_active = std::round(static_cast<double>(nodes) * active_fraction);
            if (n_active < 2) throw InvalidArgument("need at least 2 active nodes");
            if (topology == Topology::Random &&
                !(avg_degree >= 0.0 && avg_degree <= n_active - 1))
                throw InvalidArgument("avg_degree must lie in [0, active nodes - 1]");
            if (topology == Topology::Hierarchical) {
                if (hub_degree_min > hub_degree_max)
                    throw InvalidArgument("hub_degree_min exceeds hub_degree_max");
                if (static_cast<double>(hub_count) >= n_active)
                    throw InvalidArgument("hub_count must be below the active count");
                if (2 * hub_count * hub_degree_max > total_entries)
                    throw InvalidArgument("hub demand exceeds total_entries");
            }
            if (attach_count && *attach_count < 1)
                throw InvalidArgument("attach_count must be at least 1");
            dynamics_params().validate();
            protocol.validate();
            engine_params().validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty())
        throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
    return value;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

enum class KeyScope { Global, Hub, Protocol };

struct KeyInfo {
    std::string_view name;
    KeyScope scope;
    bool numeric;  // sweepable
};

inline constexpr std::array<KeyInfo, 27> kKeys{{
    {"topology", KeyScope::Global, false},
    {"nodes", KeyScope::Global, true},
    {"avg_degree", KeyScope::Global, true},
    {"active_fraction", KeyScope::Global, true},
    {"attach_count", KeyScope::Global, true},
    {"p_activate", KeyScope::Global, true},
    {"p_deactivate", KeyScope::Global, true},
    {"hub_count", KeyScope::Hub, true},
    {"hub_degree_min", KeyScope::Hub, true},
    {"hub_degree_max", KeyScope::Hub, true},
    {"total_entries", KeyScope::Hub, true},
    {"hub_churn", KeyScope::Hub, false},
    {"hub_refill", KeyScope::Hub, false},
    {"protocol", KeyScope::Global, false},
    {"p", KeyScope::Protocol, true},
    {"fanout", KeyScope::Protocol, true},
    {"ddf_x", KeyScope::Protocol, true},
    {"ddf_mode", KeyScope::Protocol, false},
    {"stem_steps", KeyScope::Protocol, true},
    {"relayer_fraction", KeyScope::Protocol, true},
    {"role_epoch_len", KeyScope::Protocol, true},
    {"failsafe", KeyScope::Protocol, false},
    {"failsafe_timeout", KeyScope::Protocol, true},
    {"epochs", KeyScope::Global, true},
    {"ttl", KeyScope::Global, true},
    {"max_steps", KeyScope::Global, true},
    {"seed", KeyScope::Global, true},
}};

inline const KeyInfo* find_key(std::string_view name) {
    for (const auto& k : kKeys)
        if (k.name == name) return &k;
    return nullptr;
}

inline bool protocol_reads(ProtocolKind kind, std::string_view key) {
    switch (kind) {
        case ProtocolKind::Broadcast: return false;
        case ProtocolKind::ProbabilisticBroadcast:
        case ProtocolKind::FixedProbability: return key == "p";
        case ProtocolKind::FixedFanout: return key == "fanout";
        case ProtocolKind::DegreeDependent: return key == "ddf_x" || key == "ddf_mode";
        case ProtocolKind::Dandelion:
            return key == "stem_steps" || key == "failsafe" || key == "failsafe_timeout";
        case ProtocolKind::DandelionPP:
            return key == "relayer_fraction" || key == "role_epoch_len" || key == "failsafe" ||
                   key == "failsafe_timeout";
    }
    return false;
}

// The parameter a protocol cannot run without.
inline std::optional<std::string_view> required_key(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::ProbabilisticBroadcast:
        case ProtocolKind::FixedProbability: return "p";
        case ProtocolKind::FixedFanout: return "fanout";
        case ProtocolKind::DegreeDependent: return "ddf_x";
        case ProtocolKind::Dandelion: return "stem_steps";
        case ProtocolKind::DandelionPP: return "relayer_fraction";
        default: return std::nullopt;
    }
}

}  // namespace detail

inline bool is_sweepable(std::string_view key) {
    const auto* k = detail::find_key(key);
    return k && k->numeric && key != "seed" && key != "epochs";
}

/// Assigns one field from its textual value. Scope checks happen in
/// ConfigBuilder; this only converts and stores.
inline void set_field(ExperimentConfig& c, std::string_view key, std::string_view value) {
    using detail::parse_number;
    if (key == "topology") {
        if (value == "random") c.topology = Topology::Random;
        else if (value == "hierarchical") c.topology = Topology::Hierarchical;
        else throw ConfigError("unknown topology '" + std::string(value) + "'");
    } else if (key == "nodes") c.nodes = parse_number<std::size_t>(key, value);
    else if (key == "avg_degree") c.avg_degree = parse_number<double>(key, value);
    else if (key == "active_fraction") c.active_fraction = parse_number<double>(key, value);
    else if (key == "attach_count") c.attach_count = parse_number<std::size_t>(key, value);
    else if (key == "p_activate") c.p_activate = parse_number<double>(key, value);
    else if (key == "p_deactivate") c.p_deactivate = parse_number<double>(key, value);
    else if (key == "hub_count") c.hub_count = parse_number<std::size_t>(key, value);
    else if (key == "hub_degree_min") c.hub_degree_min = parse_number<std::size_t>(key, value);
    else if (key == "hub_degree_max") c.hub_degree_max = parse_number<std::size_t>(key, value);
    else if (key == "total_entries") c.total_entries = parse_number<std::size_t>(key, value);
    else if (key == "hub_churn") c.hub_churn = detail::parse_bool(key, value);
    else if (key == "hub_refill") c.hub_refill = detail::parse_bool(key, value);
    else if (key == "protocol") {
        auto kind = parse_protocol_kind(value);
        if (!kind) throw ConfigError("unknown protocol '" + std::string(value) + "'");
        c.protocol.kind = *kind;
    } else if (key == "p") c.protocol.p = parse_number<double>(key, value);
    else if (key == "fanout") c.protocol.fanout = parse_number<std::uint32_t>(key, value);
    else if (key == "ddf_x") c.protocol.ddf_x = parse_number<double>(key, value);
    else if (key == "ddf_mode") {
        auto mode = parse_ddf_mode(value);
        if (!mode) throw ConfigError("ddf_mode must be log or exp");
        c.protocol.ddf_mode = *mode;
    } else if (key == "stem_steps") c.protocol.stem_steps = parse_number<std::uint32_t>(key, value);
    else if (key == "relayer_fraction") c.protocol.relayer_fraction = parse_number<double>(key, value);
    else if (key == "role_epoch_len") c.protocol.role_epoch_len = parse_number<Timestep>(key, value);
    else if (key == "failsafe") c.protocol.failsafe_enabled = detail::parse_bool(key, value);
    else if (key == "failsafe_timeout") c.protocol.failsafe_timeout = parse_number<Timestep>(key, value);
    else if (key == "epochs") c.epochs = parse_number<std::uint64_t>(key, value);
    else if (key == "ttl") c.ttl = parse_number<std::uint32_t>(key, value);
    else if (key == "max_steps") c.max_steps = parse_number<Timestep>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else throw ConfigError("unknown key '" + std::string(key) + "'");
}

/// Collects key=value assignments (from files and command-line overrides)
/// and turns them into a validated ExperimentConfig.
class ConfigBuilder {
public:
    void add_text(std::string_view text, std::string_view source = "config") {
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            std::string body = detail::trim(line);
            if (body.empty()) continue;
            auto eq = body.find('=');
            std::string where = std::string(source) + ":" + std::to_string(line_no);
            if (eq == std::string::npos)
                throw ConfigError(where + ": expected key=value, got '" + body + "'");
            set(detail::trim(std::string_view(body).substr(0, eq)),
                detail::trim(std::string_view(body).substr(eq + 1)), where);
            if (end == text.size()) break;
        }
    }

    void set(std::string key, std::string value, std::string where = "override") {
        if (!detail::find_key(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
        auto it = entries_.find(key);
        if (it != entries_.end() && it->second.where != "override" && where != "override")
            throw ConfigError(where + ": duplicate key '" + key + "' (first set at " +
                              it->second.where + ")");
        entries_[key] = {std::move(value), std::move(where)};
    }

    bool has(std::string_view key) const { return entries_.count(std::string(key)) != 0; }

    // With `tuning`, the tuned parameter may be left out; a placeholder fills it.
    ExperimentConfig build(bool tuning = false) const {
        ExperimentConfig c;
        auto apply = [&](const std::string& key) {
            auto it = entries_.find(key);
            if (it == entries_.end()) return;
            try {
                set_field(c, key, it->second.value);
            } catch (const ConfigError& e) {
                throw ConfigError(it->second.where + ": " + e.what());
            }
        };
        apply("protocol");
        apply("topology");
        c.protocol.failsafe_enabled = c.protocol.kind == ProtocolKind::DandelionPP;
        for (const auto& [key, entry] : entries_) {
            const auto* info = detail::find_key(key);
            if (info->scope == detail::KeyScope::Protocol &&
                !detail::protocol_reads(c.protocol.kind, key))
                throw ConfigError(entry.where + ": key '" + key + "' is not used by protocol " +
                                  std::string(to_string(c.protocol.kind)));
            if (info->scope == detail::KeyScope::Hub && c.topology != Topology::Hierarchical)
                throw ConfigError(entry.where + ": key '" + key +
                                  "' requires topology=hierarchical");
            if (key == "avg_degree" && c.topology == Topology::Hierarchical)
                throw ConfigError(entry.where +
                                  ": avg_degree is set through total_entries for hierarchical");
            if (key != "protocol" && key != "topology") apply(key);
        }
        if (auto req = detail::required_key(c.protocol.kind); req && !has(*req)) {
            if (tuning && c.protocol.tunable()) {
                if (*req == "p") c.protocol.p = 100.0;
                if (*req == "fanout") c.protocol.fanout = 1;
                if (*req == "ddf_x") c.protocol.ddf_x = c.protocol.ddf_mode == DdfMode::Exp ? 0.0 : 2.0;
                c.validate();
                return c;
            }
            throw ConfigError("protocol " + std::string(to_string(c.protocol.kind)) +
                              " requires '" + std::string(*req) + "'");
        }
        c.validate();
        return c;
    }

private:
    struct Entry {
        std::string value;
        std::string where;
    };
    std::map<std::string, Entry> entries_;
};

inline ExperimentConfig parse_config(std::string_view text) {
    ConfigBuilder b;
    b.add_text(text);
    return b.build();
}

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
inline std::string serialize_config(const ExperimentConfig& c, bool include_seed = true) {
    using detail::format_double;
    std::ostringstream os;
    os << "topology=" << to_string(c.topology) << '\n';
    os << "nodes=" << c.nodes << '\n';
    if (c.topology == Topology::Random) os << "avg_degree=" << format_double(c.avg_degree) << '\n';
    os << "active_fraction=" << format_double(c.active_fraction) << '\n';
    if (c.attach_count) os << "attach_count=" << *c.attach_count << '\n';
    os << "p_activate=" << format_double(c.p_activate) << '\n';
    os << "p_deactivate=" << format_double(c.p_deactivate) << '\n';
    if (c.topology == Topology::Hierarchical) {
        os << "hub_count=" << c.hub_count << '\n';
        os << "hub_degree_min=" << c.hub_degree_min << '\n';
        os << "hub_degree_max=" << c.hub_degree_max << '\n';
        os << "total_entries=" << c.total_entries << '\n';
        os << "hub_churn=" << (c.hub_churn ? "true" : "false") << '\n';
        os << "hub_refill=" << (c.hub_refill ? "true" : "false") << '\n';
    }
    const ProtocolSpec& p = c.protocol;
    os << "protocol=" << to_string(p.kind) << '\n';
    switch (p.kind) {
        case ProtocolKind::Broadcast: break;
        case ProtocolKind::ProbabilisticBroadcast:
        case ProtocolKind::FixedProbability: os << "p=" << format_double(p.p) << '\n'; break;
        case ProtocolKind::FixedFanout: os << "fanout=" << p.fanout << '\n'; break;
        case ProtocolKind::DegreeDependent:
            os << "ddf_x=" << format_double(p.ddf_x) << '\n';
            os << "ddf_mode=" << to_string(p.ddf_mode) << '\n';
            break;
        case ProtocolKind::Dandelion:
            os << "stem_steps=" << p.stem_steps << '\n';
            break;
        case ProtocolKind::DandelionPP:
            os << "relayer_fraction=" << format_double(p.relayer_fraction) << '\n';
            os << "role_epoch_len=" << p.role_epoch_len << '\n';
            break;
    }
    if (p.uses_stem()) {
        os << "failsafe=" << (p.failsafe_enabled ? "true" : "false") << '\n';
        if (p.failsafe_timeout) os << "failsafe_timeout=" << *p.failsafe_timeout << '\n';
    }
    os << "epochs=" << c.epochs << '\n';
    os << "ttl=" << c.ttl << '\n';
    if (c.max_steps) os << "max_steps=" << *c.max_steps << '\n';
    if (include_seed) os << "seed=" << c.seed << '\n';
    return os.str();
}

/// FNV-1a over the canonical form without the seed, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : serialize_config(c, false)) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

/// Builds the initial overlay for a configuration.
inline TemporalGraph build_graph(const ExperimentConfig& c) {
    if (c.topology == Topology::Random)
        return generate_random_graph(c.nodes, c.avg_degree, c.active_fraction, c.seed);
    return generate_hierarchical_graph(c.hierarchical_params(), c.seed);
}

}  // namespace gossipsim
