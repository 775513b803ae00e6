#pragma once

#include <initializer_list>
#include <utility>

#include "gossipsim/gossipsim.hpp"

namespace gossipsim::test {

// All nodes active, links as given.
inline TemporalGraph make_graph(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> links) {
    TemporalGraph g(n);
    for (NodeId v = 0; v < n; ++v) g.activate(v);
    for (auto [a, b] : links) g.add_link(a, b);
    return g;
}

inline TemporalGraph make_path(std::size_t n) {
    TemporalGraph g(n);
    for (NodeId v = 0; v < n; ++v) g.activate(v);
    for (NodeId v = 0; v + 1 < n; ++v) g.add_link(v, v + 1);
    return g;
}

inline DynamicsParams frozen_dynamics() {
    DynamicsParams d;
    d.p_activate = 0.0;
    d.p_deactivate = 0.0;
    return d;
}

}  // namespace gossipsim::test
