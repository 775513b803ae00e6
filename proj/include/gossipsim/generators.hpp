// Initial overlay construction: uniform G(n, m) over the active nodes, and a
// hub-and-spoke variant where a few pinned hubs carry very high degree.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gossipsim/rng.hpp"
#include "gossipsim/temporal_graph.hpp"
#include "gossipsim/types.hpp"

namespace gossipsim {

namespace detail {

inline std::size_t active_target(std::size_t n, double active_fraction) {
    if (!(active_fraction > 0.0 && active_fraction <= 1.0))
        throw InvalidArgument("active_fraction must lie in (0,1]");
    auto k = static_cast<std::size_t>(std::llround(static_cast<double>(n) * active_fraction));
    return std::clamp<std::size_t>(k, 1, n);
}

// Activates a uniform random subset of `count` nodes; returns them in id order.
inline std::vector<NodeId> activate_subset(TemporalGraph& g, std::size_t count, Rng& rng) {
    std::vector<std::size_t> picks;
    sample_distinct(rng, g.node_count(), count, picks);
    std::vector<NodeId> nodes;
    nodes.reserve(picks.size());
    for (std::size_t i : picks) nodes.push_back(static_cast<NodeId>(i));
    std::sort(nodes.begin(), nodes.end());
    for (NodeId v : nodes) g.activate(v);
    return nodes;
}

inline std::uint64_t pair_key(NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Places `links` distinct undirected links uniformly among `pool`, skipping
// pairs already linked in `g`.
inline void place_uniform_links(TemporalGraph& g, const std::vector<NodeId>& pool,
                                std::size_t links, Rng& rng) {
    const std::size_t k = pool.size();
    if (links == 0 || k < 2) return;
    const std::uint64_t pairs = static_cast<std::uint64_t>(k) * (k - 1) / 2;
    if (pairs <= 4'000'000 && links * 3 > pairs) {
        // Dense request: enumerate free pairs and take a uniform subset.
        std::vector<std::pair<NodeId, NodeId>> free;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (!g.has_entry(pool[i], pool[j])) free.emplace_back(pool[i], pool[j]);
        std::vector<std::size_t> picks;
        sample_distinct(rng, free.size(), links, picks);
        for (std::size_t i : picks) g.add_link(free[i].first, free[i].second);
        return;
    }
    std::size_t made = 0;
    while (made < links) {
        NodeId a = pool[uniform_index(rng, k)];
        NodeId b = pool[uniform_index(rng, k)];
        if (g.add_link(a, b)) ++made;
    }
}

inline void queue_isolated(TemporalGraph& g) {
    for (NodeId v : g.active_nodes())
        if (g.degree(v) == 0) g.mark_isolated(v);
}

}  // namespace detail

/// Uniform random graph with round(n_active * avg_degree / 2) links among
/// round(n * active_fraction) active nodes. Inactive nodes have no entries.
inline TemporalGraph generate_random_graph(std::size_t n, double avg_degree,
                                           double active_fraction, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("random graph needs at least 2 nodes");
    if (!(avg_degree >= 0.0)) throw InvalidArgument("avg_degree must be non-negative");
    const std::size_t n_active = detail::active_target(n, active_fraction);
    if (n_active < 2) throw InvalidArgument("random graph needs at least 2 active nodes");
    if (avg_degree > static_cast<double>(n_active - 1))
        throw InvalidArgument("avg_degree exceeds the maximum for the active node count");

    Rng rng = make_rng(seed, Stream::Graph);
    TemporalGraph g(n);
    auto active = detail::activate_subset(g, n_active, rng);
    auto links = static_cast<std::size_t>(
        std::llround(static_cast<double>(n_active) * avg_degree / 2.0));
    const std::size_t max_links = n_active * (n_active - 1) / 2;
    detail::place_uniform_links(g, active, std::min(links, max_links), rng);
    detail::queue_isolated(g);
    return g;
}

struct HierarchicalParams {
    std::size_t n = 10'000;
    std::size_t hub_count = 80;
    std::size_t hub_degree_min = 250;
    std::size_t hub_degree_max = 300;
    // Target sum of all adjacency list lengths (2 per undirected link).
    std::size_t total_directed_entries = 120'000;
    double active_fraction = 0.8;
};

/// Hubs draw a uniform degree in [hub_degree_min, hub_degree_max] and link to
/// uniformly chosen non-hub active nodes; the remaining entry budget becomes
/// uniform links among non-hub active nodes.
inline TemporalGraph generate_hierarchical_graph(const HierarchicalParams& p,
                                                 std::uint64_t seed) {
    if (p.n < 2) throw InvalidArgument("hierarchical graph needs at least 2 nodes");
    if (p.hub_degree_min > p.hub_degree_max || (p.hub_count > 0 && p.hub_degree_min == 0))
        throw InvalidArgument("hub degree range must satisfy 1 <= min <= max");
    const std::size_t n_active = detail::active_target(p.n, p.active_fraction);
    if (p.hub_count >= n_active) throw InvalidArgument("hub_count must be below the active count");
    const std::size_t spokes = n_active - p.hub_count;
    if (p.hub_count > 0 && p.hub_degree_max > spokes)
        throw InvalidArgument("hub degree exceeds the number of non-hub active nodes");
    if (2 * p.hub_count * p.hub_degree_max > p.total_directed_entries)
        throw InvalidArgument("hub demand exceeds the total entry budget");
    const std::size_t spoke_link_budget =
        (p.total_directed_entries - 2 * p.hub_count * p.hub_degree_min) / 2;
    if (spoke_link_budget > spokes * (spokes - 1) / 2)
        throw InvalidArgument("entry budget exceeds what the non-hub nodes can hold");

    Rng rng = make_rng(seed, Stream::Graph);
    TemporalGraph g(p.n);
    auto active = detail::activate_subset(g, n_active, rng);

    std::vector<std::size_t> picks;
    sample_distinct(rng, active.size(), p.hub_count, picks);
    std::vector<std::uint8_t> hub_mask(p.n, 0);
    std::vector<NodeId> hubs;
    for (std::size_t i : picks) {
        hubs.push_back(active[i]);
        hub_mask[active[i]] = 1;
    }
    std::vector<NodeId> others;
    others.reserve(spokes);
    for (NodeId v : active)
        if (!hub_mask[v]) others.push_back(v);

    std::uniform_int_distribution<std::size_t> hub_degree{p.hub_degree_min, p.hub_degree_max};
    for (NodeId h : hubs) {
        std::size_t d = hub_degree(rng);
        g.set_hub(h, d);
        sample_distinct(rng, others.size(), d, picks);
        for (std::size_t i : picks) g.add_link(h, others[i]);
    }

    const std::size_t used = g.directed_entries();
    const std::size_t remaining = p.total_directed_entries > used
                                      ? (p.total_directed_entries - used + 1) / 2
                                      : 0;
    detail::place_uniform_links(g, others, remaining, rng);
    detail::queue_isolated(g);
    return g;
}

}  // namespace gossipsim
