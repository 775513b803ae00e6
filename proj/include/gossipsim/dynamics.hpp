// Churn model: nodes switch on and off with fixed per-timestep
// probabilities, and nodes that come online (or end up with no neighbors)
// attach to uniformly chosen active peers.
//
// A full timestep runs three sub-steps in a fixed order:
//   1. notify_departures  - drop entries toward nodes that left last step
//   2. deactivations      - non-pinned active nodes leave with p_deactivate
//   3. activations        - inactive nodes join with p_activate, then attach;
//                           isolated active nodes reattach; hubs refill
// The simulation engine runs its message phase between 1 and 2.

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "gossipsim/rng.hpp"
#include "gossipsim/temporal_graph.hpp"
#include "gossipsim/types.hpp"

namespace gossipsim {

struct DynamicsParams {
    double p_activate = 0.01;
    double p_deactivate = 0.0025;
    std::size_t attach_count = 15;
    // Exempt from deactivation (the current applicant and holder).
    std::vector<NodeId> pinned;
    // Hubs may deactivate like any other node.
    bool hub_churn = false;
    // Active hubs below their target degree attach to fresh non-hub peers.
    bool hub_refill = true;

    void validate() const {
        if (!(p_activate >= 0.0 && p_activate <= 1.0))
            throw InvalidArgument("p_activate must lie in [0,1]");
        if (!(p_deactivate >= 0.0 && p_deactivate <= 1.0))
            throw InvalidArgument("p_deactivate must lie in [0,1]");
        if (attach_count < 1) throw InvalidArgument("attach_count must be at least 1");
    }

    /// Long-run expected active fraction of the two-state chain.
    double steady_state_active_fraction() const {
        double total = p_activate + p_deactivate;
        return total > 0.0 ? p_activate / total : 0.0;
    }

    bool is_pinned(NodeId v) const {
        return std::find(pinned.begin(), pinned.end(), v) != pinned.end();
    }
};

/// Links `u` to up to `count` distinct active peers chosen uniformly among
/// those it is not yet linked to. Returns the number of links created.
inline std::size_t attach_random_peers(TemporalGraph& graph, NodeId u, std::size_t count,
                                       Rng& rng, DynamicsDelta* delta,
                                       bool exclude_hubs = false) {
    if (count == 0 || !graph.is_active(u)) return 0;
    auto accept = [&](NodeId v) {
        if (v == u || (exclude_hubs && graph.is_hub(v))) return false;
        return graph.add_link(u, v);
    };
    std::size_t made = 0;
    const std::size_t max_attempts = 16 * count + 64;
    for (std::size_t attempt = 0; made < count && attempt < max_attempts; ++attempt) {
        auto active = graph.active_nodes();
        NodeId v = active[uniform_index(rng, active.size())];
        if (accept(v)) {
            ++made;
            if (delta) delta->attachments.emplace_back(u, v);
        }
    }
    if (made == count) return made;

    // Crowded neighborhood: enumerate the remaining candidates.
    std::vector<NodeId> candidates;
    for (NodeId v : graph.active_nodes()) {
        if (v == u || (exclude_hubs && graph.is_hub(v))) continue;
        if (graph.has_entry(u, v) || graph.has_entry(v, u)) continue;
        candidates.push_back(v);
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<std::size_t> picks;
    sample_distinct(rng, candidates.size(), count - made, picks);
    for (std::size_t i : picks) {
        if (accept(candidates[i])) {
            ++made;
            if (delta) delta->attachments.emplace_back(u, candidates[i]);
        }
    }
    return made;
}

/// Sub-steps 2 and 3. Does not touch the clock.
inline void apply_churn(TemporalGraph& graph, const DynamicsParams& params, Rng& rng,
                        DynamicsDelta* delta = nullptr) {
    // Each eligible node flips independently; drawing a binomial count and a
    // uniform subset of that size has the same law and costs O(events).
    std::vector<std::size_t> picks;

    std::vector<NodeId> leaving;
    {
        auto active = graph.active_nodes();
        sample_distinct(rng, active.size(), binomial(rng, active.size(), params.p_deactivate),
                        picks);
        for (std::size_t i : picks) {
            NodeId v = active[i];
            if (params.is_pinned(v)) continue;
            if (graph.is_hub(v) && !params.hub_churn) continue;
            leaving.push_back(v);
        }
    }
    std::vector<NodeId> joining;
    {
        auto inactive = graph.inactive_nodes();
        sample_distinct(rng, inactive.size(), binomial(rng, inactive.size(), params.p_activate),
                        picks);
        for (std::size_t i : picks) joining.push_back(inactive[i]);
    }

    for (NodeId v : leaving) {
        graph.deactivate(v);
        if (delta) delta->deactivated.push_back(v);
    }
    for (NodeId v : joining) {
        graph.activate(v);
        if (delta) delta->activated.push_back(v);
        if (attach_random_peers(graph, v, params.attach_count, rng, delta) == 0)
            graph.mark_isolated(v);
    }
    for (NodeId v : graph.take_isolated()) {
        if (!graph.is_active(v) || graph.degree(v) != 0) continue;
        attach_random_peers(graph, v, params.attach_count, rng, delta);
        if (graph.degree(v) == 0) graph.mark_isolated(v);  // retry next step
    }
    if (params.hub_refill) {
        for (const HubTarget& hub : graph.hubs()) {
            if (!graph.is_active(hub.node)) continue;
            std::size_t deg = graph.degree(hub.node);
            if (deg < hub.degree)
                attach_random_peers(graph, hub.node, hub.degree - deg, rng, delta, true);
        }
    }
}

/// One complete timestep of overlay evolution (no message traffic).
inline void step_dynamics(TemporalGraph& graph, const DynamicsParams& params, Rng& rng,
                          DynamicsDelta& delta) {
    delta.clear();
    graph.notify_departures(&delta);
    apply_churn(graph, params, rng, &delta);
    graph.advance_clock();
}

inline DynamicsDelta step_dynamics(TemporalGraph& graph, const DynamicsParams& params,
                                   Rng& rng) {
    DynamicsDelta delta;
    step_dynamics(graph, params, rng, delta);
    return delta;
}

}  // namespace gossipsim
