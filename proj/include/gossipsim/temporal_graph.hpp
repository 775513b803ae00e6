// Temporal overlay: per-node activation state plus directed adjacency
// entries with delayed departure notification.
//
// An undirected link is stored as two mirrored entries. When a node
// deactivates it drops its own entries at once; every former neighbor keeps
// its entry toward the departed node until notify_departures() runs at the
// next timestep. Those one-sided entries are the only asymmetry allowed.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gossipsim/rng.hpp"
#include "gossipsim/types.hpp"

namespace gossipsim {

struct DynamicsDelta {
    std::vector<NodeId> activated;
    std::vector<NodeId> deactivated;
    // (owner, departed): owner dropped its stale entry toward departed.
    std::vector<std::pair<NodeId, NodeId>> stale_removals;
    // (node, peer): a fresh undirected link created by (re)attachment.
    std::vector<std::pair<NodeId, NodeId>> attachments;

    void clear() {
        activated.clear();
        deactivated.clear();
        stale_removals.clear();
        attachments.clear();
    }
};

struct HubTarget {
    NodeId node;
    std::size_t degree;
};

class TemporalGraph {
public:
    explicit TemporalGraph(std::size_t node_count)
        : adjacency_(node_count),
          active_(node_count, 0),
          position_(node_count),
          deactivated_at_(node_count, kNever),
          hub_degree_(node_count, 0) {
        if (node_count == 0) throw InvalidArgument("graph needs at least one node");
        if (node_count >= kNoNode) throw InvalidArgument("node count exceeds id space");
        inactive_.reserve(node_count);
        for (std::size_t v = 0; v < node_count; ++v) {
            position_[v] = inactive_.size();
            inactive_.push_back(static_cast<NodeId>(v));
        }
    }

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    Timestep timestep() const noexcept { return timestep_; }
    std::size_t active_count() const noexcept { return active_list_.size(); }
    std::span<const NodeId> active_nodes() const noexcept { return active_list_; }
    std::span<const NodeId> inactive_nodes() const noexcept { return inactive_; }
    std::size_t directed_entries() const noexcept { return entries_; }

    bool is_active(NodeId v) const { return active_[v] != 0; }
    std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
    std::size_t degree(NodeId v) const { return adjacency_[v].size(); }

    bool has_entry(NodeId u, NodeId v) const {
        const auto& list = adjacency_[u];
        return std::find(list.begin(), list.end(), v) != list.end();
    }

    std::optional<Timestep> deactivated_at(NodeId v) const {
        if (deactivated_at_[v] == kNever) return std::nullopt;
        return deactivated_at_[v];
    }

    bool is_hub(NodeId v) const { return hub_degree_[v] != 0; }
    std::span<const HubTarget> hubs() const noexcept { return hubs_; }

    void set_hub(NodeId v, std::size_t target_degree) {
        if (target_degree == 0) throw InvalidArgument("hub target degree must be positive");
        if (is_hub(v)) throw InvalidArgument("node is already a hub");
        hub_degree_[v] = target_degree;
        hubs_.push_back({v, target_degree});
    }

    void activate(NodeId v) {
        if (is_active(v)) return;
        move_between(inactive_, active_list_, v);
        active_[v] = 1;
    }

    // Drops v's own entries now. Former neighbors learn about it at the next
    // timestep through notify_departures().
    void deactivate(NodeId v) {
        if (!is_active(v)) return;
        move_between(active_list_, inactive_, v);
        active_[v] = 0;
        deactivated_at_[v] = timestep_;
        entries_ -= adjacency_[v].size();
        departures_.push_back({v, timestep_, std::move(adjacency_[v])});
        adjacency_[v] = {};
    }

    // Creates both entries of an undirected link. Returns false (and changes
    // nothing) for self-links, inactive endpoints or an existing entry in
    // either direction.
    bool add_link(NodeId u, NodeId v) {
        if (u == v || !is_active(u) || !is_active(v)) return false;
        if (has_entry(u, v) || has_entry(v, u)) return false;
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
        entries_ += 2;
        return true;
    }

    // Processes departures recorded at earlier timesteps: each former
    // neighbor removes its stale entry. Active nodes left without entries are
    // queued for reattachment (see take_isolated()).
    void notify_departures(DynamicsDelta* delta = nullptr) {
        std::size_t kept = 0;
        for (std::size_t i = 0; i < departures_.size(); ++i) {
            Departure& d = departures_[i];
            if (d.at >= timestep_) {
                if (kept != i) departures_[kept] = std::move(d);
                ++kept;
                continue;
            }
            for (NodeId u : d.former) {
                auto& list = adjacency_[u];
                auto it = std::find(list.begin(), list.end(), d.node);
                if (it == list.end()) continue;
                list.erase(it);
                --entries_;
                if (delta) delta->stale_removals.emplace_back(u, d.node);
                if (list.empty() && is_active(u)) isolated_.push_back(u);
            }
        }
        departures_.resize(kept);
    }

    std::vector<NodeId> take_isolated() {
        std::vector<NodeId> out;
        out.swap(isolated_);
        return out;
    }

    void mark_isolated(NodeId v) { isolated_.push_back(v); }

    void advance_clock() noexcept { ++timestep_; }

    bool has_pending_departures() const noexcept { return !departures_.empty(); }

    // Checks the structural invariants. Returns an empty string when they
    // hold, otherwise a description of the first violation.
    std::string validate() const {
        std::ostringstream err;
        std::size_t counted = 0;
        for (NodeId u = 0; u < node_count(); ++u) {
            const auto& list = adjacency_[u];
            counted += list.size();
            if (!is_active(u) && !list.empty()) {
                err << "inactive node " << u << " holds " << list.size() << " entries";
                return err.str();
            }
            std::vector<NodeId> sorted(list.begin(), list.end());
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
                err << "duplicate entry in list of " << u;
                return err.str();
            }
            for (NodeId v : list) {
                if (v == u) {
                    err << "self-loop at " << u;
                    return err.str();
                }
                if (v >= node_count()) {
                    err << "entry " << u << "->" << v << " out of range";
                    return err.str();
                }
                if (has_entry(v, u)) continue;
                // One-sided: only legal while u has not processed v's departure.
                if (is_active(v) || deactivated_at_[v] == kNever ||
                    deactivated_at_[v] + 1 < timestep_) {
                    err << "one-sided entry " << u << "->" << v;
                    return err.str();
                }
            }
        }
        if (counted != entries_) {
            err << "entry counter " << entries_ << " != " << counted;
            return err.str();
        }
        for (std::size_t i = 0; i < active_list_.size(); ++i) {
            NodeId v = active_list_[i];
            if (!is_active(v) || position_[v] != i) return "active index corrupted";
        }
        if (active_list_.size() + inactive_.size() != node_count())
            return "activation lists do not partition the nodes";
        return {};
    }

    // Edge list export: header "n=<count> t=<timestep> active=<count>" then
    // one "u v" line (u < v) per undirected link, ascending.
    void write_snapshot(std::ostream& os) const {
        os << "n=" << node_count() << " t=" << timestep_ << " active=" << active_count()
           << '\n';
        std::vector<NodeId> row;
        for (NodeId u = 0; u < node_count(); ++u) {
            row.clear();
            for (NodeId v : adjacency_[u])
                if (u < v) row.push_back(v);
            // one-sided entries owned by the larger endpoint
            for (NodeId v : adjacency_[u])
                if (v < u && !has_entry(v, u)) row.push_back(v);
            std::sort(row.begin(), row.end());
            for (NodeId v : row) {
                if (v > u)
                    os << u << ' ' << v << '\n';
                else
                    os << v << ' ' << u << '\n';
            }
        }
    }

private:
    static constexpr Timestep kNever = std::numeric_limits<Timestep>::max();

    struct Departure {
        NodeId node;
        Timestep at;
        std::vector<NodeId> former;
    };

    void move_between(std::vector<NodeId>& from, std::vector<NodeId>& to, NodeId v) {
        std::size_t i = position_[v];
        NodeId last = from.back();
        from[i] = last;
        position_[last] = i;
        from.pop_back();
        position_[v] = to.size();
        to.push_back(v);
    }

    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<std::uint8_t> active_;
    std::vector<std::size_t> position_;
    std::vector<NodeId> active_list_;
    std::vector<NodeId> inactive_;
    std::vector<Timestep> deactivated_at_;
    std::vector<std::size_t> hub_degree_;
    std::vector<HubTarget> hubs_;
    std::vector<Departure> departures_;
    std::vector<NodeId> isolated_;
    std::size_t entries_ = 0;
    Timestep timestep_ = 0;
};

}  // namespace gossipsim
