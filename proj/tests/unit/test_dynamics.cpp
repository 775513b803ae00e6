#include <gtest/gtest.h>

#include <set>

#include "helpers.hpp"

using namespace gossipsim;

TEST(Dynamics, SteadyStateFractionFromBalance) {
    DynamicsParams d;
    // p_on / (p_on + p_off) = 0.01 / 0.0125
    EXPECT_DOUBLE_EQ(d.steady_state_active_fraction(), 0.8);
}

TEST(Dynamics, ValidateRejectsBadProbabilities) {
    DynamicsParams d;
    d.p_activate = 1.5;
    EXPECT_THROW(d.validate(), InvalidArgument);
    d = {};
    d.attach_count = 0;
    EXPECT_THROW(d.validate(), InvalidArgument);
}

TEST(Dynamics, InvariantsHoldEveryStep) {
    auto g = generate_random_graph(400, 6, 0.8, 11);
    DynamicsParams d;
    d.p_activate = 0.05;
    d.p_deactivate = 0.02;
    d.attach_count = 6;
    Rng rng(3);
    for (int t = 0; t < 300; ++t) {
        step_dynamics(g, d, rng);
        ASSERT_EQ(g.validate(), "") << "at step " << t;
    }
}

TEST(Dynamics, DeltaDescribesTheStep) {
    auto g = generate_random_graph(300, 6, 0.8, 5);
    DynamicsParams d;
    d.p_activate = 0.1;
    d.p_deactivate = 0.1;
    d.attach_count = 4;
    Rng rng(8);
    DynamicsDelta prev = step_dynamics(g, d, rng);
    for (int t = 0; t < 20; ++t) {
        DynamicsDelta delta = step_dynamics(g, d, rng);
        // Every stale removal points at a node that left during the previous step.
        std::set<NodeId> left(prev.deactivated.begin(), prev.deactivated.end());
        for (auto [owner, gone] : delta.stale_removals) EXPECT_TRUE(left.count(gone));
        for (NodeId v : delta.activated) EXPECT_TRUE(g.is_active(v));
        prev = delta;
    }
}

TEST(Dynamics, JoinersAttachToDistinctActivePeers) {
    TemporalGraph g(60);
    for (NodeId v = 0; v < 50; ++v) g.activate(v);
    DynamicsParams d;
    d.p_activate = 1.0;
    d.p_deactivate = 0.0;
    d.attach_count = 7;
    Rng rng(1);
    DynamicsDelta delta = step_dynamics(g, d, rng);
    EXPECT_EQ(delta.activated.size(), 10u);
    for (NodeId v : delta.activated) EXPECT_GE(g.degree(v), 7u);
    EXPECT_EQ(g.validate(), "");
}

TEST(Dynamics, IsolatedNodesReattach) {
    // 0 loses its only neighbor; after notification it must reattach.
    auto g = gossipsim::test::make_graph(10, {{0, 1}, {2, 3}, {3, 4}, {5, 6}, {7, 8}, {8, 9}});
    DynamicsParams d = gossipsim::test::frozen_dynamics();
    d.attach_count = 3;
    g.deactivate(1);
    g.advance_clock();
    Rng rng(2);
    step_dynamics(g, d, rng);
    EXPECT_EQ(g.degree(0), 3u);
    EXPECT_EQ(g.validate(), "");
}

TEST(Dynamics, PinnedNodesNeverLeave) {
    auto g = generate_random_graph(200, 5, 1.0, 4);
    DynamicsParams d;
    d.p_activate = 0.0;
    d.p_deactivate = 0.5;
    d.attach_count = 3;
    d.pinned = {3, 17};
    Rng rng(6);
    for (int t = 0; t < 30; ++t) {
        step_dynamics(g, d, rng);
        ASSERT_TRUE(g.is_active(3));
        ASSERT_TRUE(g.is_active(17));
    }
}

TEST(Dynamics, HubsExemptAndRefilled) {
    HierarchicalParams hp;
    hp.n = 600;
    hp.hub_count = 4;
    hp.hub_degree_min = 40;
    hp.hub_degree_max = 40;
    hp.total_directed_entries = 4000;
    hp.active_fraction = 0.8;
    auto g = generate_hierarchical_graph(hp, 12);
    DynamicsParams d;
    d.p_activate = 0.05;
    d.p_deactivate = 0.05;
    d.attach_count = 5;
    Rng rng(4);
    for (int t = 0; t < 100; ++t) {
        step_dynamics(g, d, rng);
        for (const auto& h : g.hubs()) {
            ASSERT_TRUE(g.is_active(h.node));
            // Refill happens after departures are noticed, so the degree is
            // back at target at the end of each step.
            ASSERT_GE(g.degree(h.node), 40u);
        }
    }
    d.hub_churn = true;
    d.p_deactivate = 1.0;
    step_dynamics(g, d, rng);
    for (const auto& h : g.hubs()) EXPECT_FALSE(g.is_active(h.node));
}

TEST(Dynamics, LongRunActiveFractionNearBalance) {
    // Start away from equilibrium; the chain relaxes with rate p_on + p_off.
    auto g = generate_random_graph(4000, 8, 0.5, 21);
    DynamicsParams d;
    d.attach_count = 8;
    Rng rng(17);
    for (int t = 0; t < 1500; ++t) step_dynamics(g, d, rng);  // warm-up
    double sum = 0;
    const int steps = 4000;
    for (int t = 0; t < steps; ++t) {
        step_dynamics(g, d, rng);
        sum += double(g.active_count()) / 4000.0;
    }
    EXPECT_NEAR(sum / steps, 0.8, 0.01);
}
