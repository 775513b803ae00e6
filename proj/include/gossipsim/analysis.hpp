// Structural health checks over the active part of a TemporalGraph.

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "gossipsim/rng.hpp"
#include "gossipsim/temporal_graph.hpp"
#include "gossipsim/types.hpp"

namespace gossipsim {

/// Number of connected components among active nodes. A link counts if
/// either of its directed entries exists.
inline std::size_t connected_components(const TemporalGraph& g) {
    std::vector<NodeId> parent(g.node_count());
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::size_t components = g.active_count();
    for (NodeId u : g.active_nodes()) {
        for (NodeId v : g.neighbors(u)) {
            if (!g.is_active(v)) continue;
            NodeId a = find(u), b = find(v);
            if (a == b) continue;
            parent[std::max(a, b)] = std::min(a, b);
            --components;
        }
    }
    return components;
}

/// Hop distances from `src` to every node; SIZE_MAX marks unreachable or
/// inactive nodes. Traversal only visits active nodes.
inline std::vector<std::size_t> bfs_distances(const TemporalGraph& g, NodeId src) {
    constexpr std::size_t kInf = static_cast<std::size_t>(-1);
    std::vector<std::size_t> dist(g.node_count(), kInf);
    if (!g.is_active(src)) return dist;
    std::vector<NodeId> frontier{src}, next;
    dist[src] = 0;
    for (std::size_t d = 1; !frontier.empty(); ++d) {
        next.clear();
        for (NodeId u : frontier)
            for (NodeId v : g.neighbors(u))
                if (g.is_active(v) && dist[v] == kInf) {
                    dist[v] = d;
                    next.push_back(v);
                }
        frontier.swap(next);
    }
    return dist;
}

inline std::optional<std::size_t> bfs_distance(const TemporalGraph& g, NodeId src, NodeId dst) {
    if (!g.is_active(src) || !g.is_active(dst)) return std::nullopt;
    if (src == dst) return 0;
    auto dist = bfs_distances(g, src);
    if (dist[dst] == static_cast<std::size_t>(-1)) return std::nullopt;
    return dist[dst];
}

/// Largest BFS eccentricity over `sample_count` distinct active sources
/// (all of them when sample_count >= active count). nullopt when some
/// sampled source cannot reach every active node.
inline std::optional<std::size_t> estimate_diameter(const TemporalGraph& g,
                                                    std::size_t sample_count, Rng& rng) {
    auto active = g.active_nodes();
    std::vector<NodeId> sources;
    if (sample_count >= active.size()) {
        sources.assign(active.begin(), active.end());
        std::sort(sources.begin(), sources.end());
    } else {
        std::vector<std::size_t> picks;
        sample_distinct(rng, active.size(), sample_count, picks);
        for (std::size_t i : picks) sources.push_back(active[i]);
    }
    std::size_t diameter = 0;
    for (NodeId s : sources) {
        auto dist = bfs_distances(g, s);
        for (NodeId v : active) {
            if (dist[v] == static_cast<std::size_t>(-1)) return std::nullopt;
            diameter = std::max(diameter, dist[v]);
        }
    }
    return diameter;
}

struct DegreeSummary {
    double mean = 0.0;
    std::size_t min = 0;
    std::size_t max = 0;
};

inline DegreeSummary degree_summary(const TemporalGraph& g) {
    DegreeSummary s;
    if (g.active_count() == 0) return s;
    s.min = static_cast<std::size_t>(-1);
    std::size_t total = 0;
    for (NodeId v : g.active_nodes()) {
        std::size_t d = g.degree(v);
        total += d;
        s.min = std::min(s.min, d);
        s.max = std::max(s.max, d);
    }
    s.mean = static_cast<double>(total) / static_cast<double>(g.active_count());
    return s;
}

}  // namespace gossipsim
