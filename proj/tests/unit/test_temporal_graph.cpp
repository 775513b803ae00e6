#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"

using namespace gossipsim;
using gossipsim::test::make_graph;

TEST(TemporalGraph, StartsInactiveAndEmpty) {
    TemporalGraph g(5);
    EXPECT_EQ(g.node_count(), 5u);
    EXPECT_EQ(g.active_count(), 0u);
    EXPECT_EQ(g.inactive_nodes().size(), 5u);
    EXPECT_EQ(g.directed_entries(), 0u);
    EXPECT_EQ(g.validate(), "");
}

TEST(TemporalGraph, AddLinkRules) {
    TemporalGraph g(4);
    g.activate(0);
    g.activate(1);
    g.activate(2);
    EXPECT_FALSE(g.add_link(0, 0));  // self
    EXPECT_FALSE(g.add_link(0, 3));  // inactive endpoint
    EXPECT_TRUE(g.add_link(0, 1));
    EXPECT_FALSE(g.add_link(1, 0));  // exists
    EXPECT_TRUE(g.has_entry(0, 1));
    EXPECT_TRUE(g.has_entry(1, 0));
    EXPECT_EQ(g.directed_entries(), 2u);
    EXPECT_EQ(g.validate(), "");
}

TEST(TemporalGraph, DepartureLeavesStaleEntryForOneStep) {
    auto g = make_graph(3, {{0, 1}, {1, 2}});
    g.deactivate(1);  // at t=0
    EXPECT_FALSE(g.is_active(1));
    EXPECT_EQ(g.degree(1), 0u);
    // Neighbors still hold the one-sided entry.
    EXPECT_TRUE(g.has_entry(0, 1));
    EXPECT_TRUE(g.has_entry(2, 1));
    EXPECT_EQ(g.directed_entries(), 2u);
    EXPECT_EQ(g.validate(), "");

    g.notify_departures();  // same timestep: nothing yet
    EXPECT_TRUE(g.has_entry(0, 1));

    g.advance_clock();
    EXPECT_EQ(g.validate(), "");  // still legal at t=1 before notification
    DynamicsDelta delta;
    g.notify_departures(&delta);
    EXPECT_FALSE(g.has_entry(0, 1));
    EXPECT_FALSE(g.has_entry(2, 1));
    EXPECT_EQ(delta.stale_removals.size(), 2u);
    EXPECT_EQ(g.directed_entries(), 0u);
    auto iso = g.take_isolated();
    std::sort(iso.begin(), iso.end());
    EXPECT_EQ(iso, (std::vector<NodeId>{0, 2}));
    EXPECT_EQ(g.validate(), "");
}

TEST(TemporalGraph, ValidateCatchesLateStaleEntry) {
    auto g = make_graph(2, {{0, 1}});
    g.deactivate(1);
    g.advance_clock();
    g.advance_clock();  // notification skipped for a whole step
    EXPECT_NE(g.validate(), "");
}

TEST(TemporalGraph, DeactivatedAtAndReactivation) {
    auto g = make_graph(2, {{0, 1}});
    g.advance_clock();
    g.advance_clock();
    g.deactivate(0);
    EXPECT_EQ(g.deactivated_at(0), Timestep{2});
    EXPECT_FALSE(g.deactivated_at(1).has_value());
    g.activate(0);
    EXPECT_TRUE(g.is_active(0));
    EXPECT_EQ(g.degree(0), 0u);
}

TEST(TemporalGraph, SnapshotFormat) {
    auto g = make_graph(4, {{2, 0}, {1, 3}, {0, 1}});
    g.deactivate(3);
    std::ostringstream os;
    g.write_snapshot(os);
    // 1->3 is one-sided but still exported until notification.
    EXPECT_EQ(os.str(), "n=4 t=0 active=3\n0 1\n0 2\n1 3\n");
}

TEST(TemporalGraph, HubRegistration) {
    TemporalGraph g(3);
    g.set_hub(1, 2);
    EXPECT_TRUE(g.is_hub(1));
    EXPECT_FALSE(g.is_hub(0));
    EXPECT_THROW(g.set_hub(1, 2), InvalidArgument);
    EXPECT_THROW(g.set_hub(0, 0), InvalidArgument);
    ASSERT_EQ(g.hubs().size(), 1u);
    EXPECT_EQ(g.hubs()[0].degree, 2u);
}
