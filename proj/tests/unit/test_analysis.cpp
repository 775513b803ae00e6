#include <gtest/gtest.h>

#include <limits>

#include "helpers.hpp"

using namespace gossipsim;
using gossipsim::test::make_graph;
using gossipsim::test::make_path;

namespace {

// All-pairs hop distances by Floyd-Warshall over active nodes.
std::vector<std::vector<std::size_t>> floyd(const TemporalGraph& g) {
    const std::size_t n = g.node_count(), inf = std::numeric_limits<std::size_t>::max() / 4;
    std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
    for (NodeId u = 0; u < n; ++u) {
        if (!g.is_active(u)) continue;
        d[u][u] = 0;
        for (NodeId v : g.neighbors(u))
            if (g.is_active(v)) d[u][v] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

}  // namespace

TEST(Analysis, ComponentsOnHandGraphs) {
    EXPECT_EQ(connected_components(make_path(6)), 1u);
    EXPECT_EQ(connected_components(make_graph(6, {{0, 1}, {2, 3}})), 4u);
    auto g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
    g.deactivate(1);
    // Inactive nodes are not counted; {0} and {2,3} remain.
    EXPECT_EQ(connected_components(g), 2u);
}

TEST(Analysis, BfsMatchesFloydWarshall) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto g = generate_random_graph(60, 3, 0.9, seed);
        auto all = floyd(g);
        for (NodeId s : g.active_nodes()) {
            auto dist = bfs_distances(g, s);
            for (NodeId v : g.active_nodes()) {
                if (all[s][v] > 1000)
                    ASSERT_EQ(dist[v], std::size_t(-1));
                else
                    ASSERT_EQ(dist[v], all[s][v]);
            }
        }
    }
}

TEST(Analysis, BfsDistancePointQueries) {
    auto g = make_path(5);
    EXPECT_EQ(bfs_distance(g, 0, 4), 4u);
    EXPECT_EQ(bfs_distance(g, 2, 2), 0u);
    g.deactivate(2);
    EXPECT_FALSE(bfs_distance(g, 0, 4).has_value());
    EXPECT_FALSE(bfs_distance(g, 0, 2).has_value());
}

TEST(Analysis, DiameterExactAndDisconnected) {
    Rng rng(1);
    EXPECT_EQ(estimate_diameter(make_path(7), 100, rng), 6u);
    auto cycle = make_path(8);
    cycle.add_link(0, 7);
    EXPECT_EQ(estimate_diameter(cycle, 100, rng), 4u);
    EXPECT_FALSE(estimate_diameter(make_graph(4, {{0, 1}}), 100, rng).has_value());
    // Sampling never exceeds the true diameter.
    auto g = generate_random_graph(300, 10, 1.0, 3);
    ASSERT_EQ(connected_components(g), 1u);
    auto full = estimate_diameter(g, 1000, rng);
    auto sampled = estimate_diameter(g, 10, rng);
    ASSERT_TRUE(full && sampled);
    EXPECT_LE(*sampled, *full);
}

TEST(Analysis, DegreeSummary) {
    auto s = degree_summary(make_graph(4, {{0, 1}, {0, 2}, {0, 3}}));
    EXPECT_DOUBLE_EQ(s.mean, 1.5);
    EXPECT_EQ(s.min, 1u);
    EXPECT_EQ(s.max, 3u);
}

TEST(Analysis, PaperGraphStaysConnectedUnderChurn) {
    auto g = generate_random_graph(10000, 15, 0.8, 7);
    DynamicsParams d;
    Rng rng(7);
    for (int t = 0; t < 400; ++t) step_dynamics(g, d, rng);
    EXPECT_EQ(connected_components(g), 1u);
}
