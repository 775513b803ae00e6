#include <gtest/gtest.h>

#include <map>
#include <set>

#include "helpers.hpp"

using namespace gossipsim;

namespace {

std::vector<ProtocolSpec> all_kinds() {
    auto d = ProtocolSpec::dandelion(3, true);
    d.failsafe_timeout = 4;
    auto dpp = ProtocolSpec::dandelion_pp(0.7, true);
    dpp.role_epoch_len = 5;
    dpp.failsafe_timeout = 6;
    return {ProtocolSpec::broadcast(),
            ProtocolSpec::probabilistic_broadcast(60),
            ProtocolSpec::fixed_probability(50),
            ProtocolSpec::fixed_fanout(2),
            ProtocolSpec::degree_dependent(0.5, DdfMode::Exp),
            ProtocolSpec::degree_dependent(8.0, DdfMode::Log),
            ProtocolSpec::dandelion(3, false),
            d,
            dpp};
}

struct Observed {
    std::map<std::pair<MessageId, NodeId>, int> forwards;
    std::map<NodeId, Phase> incoming;  // phase of the copy a node is relaying
    std::map<std::pair<MessageId, Timestep>, int> stem_sends;
    std::uint32_t max_ttl_seen = 0;
    bool zero_ttl_forward = false;
    bool phase_regressed = false;
};

}  // namespace

// Drives every protocol over small churning graphs and checks the per-hop
// invariants on every envelope.
TEST(Properties, EngineInvariantsAcrossProtocols) {
    const std::uint32_t ttl = 6;
    for (const auto& spec : all_kinds()) {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            auto g = generate_random_graph(40, 4, 0.8, seed);
            DynamicsParams dyn;
            dyn.p_activate = 0.05;
            dyn.p_deactivate = 0.02;
            dyn.attach_count = 4;
            Simulation sim(g, spec, EngineParams{ttl, 30}, dyn, seed);
            Observed o;
            EngineHooks hooks;
            hooks.on_forward = [&](NodeId node, const MessageEnvelope& m) {
                if (++o.forwards[{m.msg_id, node}] > 1) ADD_FAILURE() << "node forwarded twice";
                if (m.ttl_remaining == 0) o.zero_ttl_forward = true;
                o.incoming[node] = m.phase;
            };
            hooks.on_send = [&](const MessageEnvelope& m) {
                o.max_ttl_seen = std::max(o.max_ttl_seen, m.ttl_remaining);
                auto it = o.incoming.find(m.sender);
                if (it != o.incoming.end() && it->second == Phase::Fluff && m.phase == Phase::Stem)
                    o.phase_regressed = true;
                if (m.phase == Phase::Stem) ++o.stem_sends[{m.msg_id, m.deliver_at}];
            };
            hooks.on_step_end = [&](Timestep) { o.incoming.clear(); };
            sim.set_hooks(hooks);
            for (int e = 0; e < 60; ++e) {
                auto r = sim.run_epoch();
                if (r.success) {
                    ASSERT_LE(*r.delay, sim.params().max_steps);
                }
                ASSERT_EQ(sim.graph().validate(), "");
            }
            SCOPED_TRACE(std::string(to_string(spec.kind)));
            EXPECT_FALSE(o.zero_ttl_forward);
            EXPECT_LE(o.max_ttl_seen, ttl - 1);  // hop count never exceeds ttl
            EXPECT_FALSE(o.phase_regressed);
            for (const auto& [key, count] : o.stem_sends) {
                // Stem width: one copy in flight per timestep, unless a
                // fail-safe broadcast started alongside it.
                if (!spec.failsafe_enabled) {
                    ASSERT_EQ(count, 1);
                }
            }
        }
    }
}

TEST(Properties, StemIsSingleHolderWithoutFailsafe) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto g = generate_random_graph(60, 5, 1.0, seed);
        auto spec = ProtocolSpec::dandelion(6, false);
        Simulation sim(g, spec, EngineParams{20, 20}, gossipsim::test::frozen_dynamics(), seed);
        std::map<Timestep, int> stem_in_flight;
        EngineHooks hooks;
        hooks.on_send = [&](const MessageEnvelope& m) {
            if (m.phase == Phase::Stem) ++stem_in_flight[m.deliver_at];
        };
        sim.set_hooks(hooks);
        for (int e = 0; e < 10; ++e) sim.run_epoch();
        for (const auto& [t, c] : stem_in_flight) ASSERT_EQ(c, 1);
    }
}

TEST(Properties, FluffNeverReturnsToStem) {
    // Dandelion++ with mixed roles: once a copy is fluff, every copy it
    // spawns is fluff.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = generate_random_graph(80, 5, 1.0, seed);
        auto spec = ProtocolSpec::dandelion_pp(0.6, false);
        spec.role_epoch_len = 3;
        Simulation sim(g, spec, EngineParams{10, 10}, gossipsim::test::frozen_dynamics(), seed);
        std::map<std::pair<MessageId, NodeId>, Phase> received;
        bool bad = false;
        EngineHooks hooks;
        hooks.on_deliver = [&](const MessageEnvelope& m, bool dup) {
            if (!dup) received[{m.msg_id, m.receiver}] = m.phase;
        };
        hooks.on_send = [&](const MessageEnvelope& m) {
            auto it = received.find({m.msg_id, m.sender});
            if (it != received.end() && it->second == Phase::Fluff && m.phase == Phase::Stem)
                bad = true;
        };
        sim.set_hooks(hooks);
        for (int e = 0; e < 30; ++e) sim.run_epoch();
        EXPECT_FALSE(bad);
    }
}

TEST(Properties, DdfFormulaSpotValues) {
    EXPECT_NEAR(ddf_probability(4, 16.0, DdfMode::Log), 0.5, 1e-12);
    EXPECT_NEAR(ddf_probability(10, 2.0, DdfMode::Exp), 0.01, 1e-12);
    for (std::size_t d = 0; d < 3; ++d) {
        EXPECT_EQ(ddf_probability(d, 16.0, DdfMode::Log), 1.0);
        EXPECT_EQ(ddf_probability(d, 2.0, DdfMode::Exp), 1.0);
    }
}

TEST(Properties, MergeConsistentOverAllSplits) {
    std::vector<EpochRecord> recs;
    for (int i = 0; i < 10; ++i) {
        EpochRecord r;
        r.success = i % 3 != 0;
        if (r.success) r.delay = Timestep(i + 1);
        r.messages_sent = std::uint64_t(7 * i + 3);
        r.lost_to_churn = std::uint64_t(i % 4);
        r.delivered = std::uint64_t(5 * i);
        r.failsafe_triggers = std::uint64_t(i % 2);
        r.recovered = r.success && i % 5 == 1;
        r.degree_queries = std::uint64_t(i * i);
        recs.push_back(r);
    }
    const AggregateMetrics whole = aggregate(recs);
    for (unsigned mask = 0; mask < (1u << recs.size()); ++mask) {
        AggregateMetrics a, b;
        for (std::size_t i = 0; i < recs.size(); ++i) ((mask >> i) & 1 ? a : b).add(recs[i]);
        AggregateMetrics ab = a, ba = b;
        ab.merge(b);
        ba.merge(a);
        ASSERT_EQ(ab, whole);
        ASSERT_EQ(ba, whole);
    }
}
