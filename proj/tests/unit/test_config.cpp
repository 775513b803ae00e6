#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace gossipsim;

TEST(Config, EmptyGivesDefaults) {
    auto c = parse_config("");
    EXPECT_EQ(c.topology, Topology::Random);
    EXPECT_EQ(c.nodes, 10000u);
    EXPECT_DOUBLE_EQ(c.avg_degree, 15.0);
    EXPECT_DOUBLE_EQ(c.active_fraction, 0.8);
    EXPECT_DOUBLE_EQ(c.p_activate, 0.01);
    EXPECT_DOUBLE_EQ(c.p_deactivate, 0.0025);
    EXPECT_EQ(c.epochs, 10000u);
    EXPECT_EQ(c.ttl, 20u);
    EXPECT_EQ(c.protocol.kind, ProtocolKind::Broadcast);
    EXPECT_EQ(c.effective_attach_count(), 15u);
    EXPECT_EQ(c.effective_max_steps(), 20u);
}

TEST(Config, CommentsAndWhitespace) {
    auto c = parse_config("# header\n  protocol = FixedProbability  # trailing\np=60\n\nepochs= 5\n");
    EXPECT_EQ(c.protocol.kind, ProtocolKind::FixedProbability);
    EXPECT_DOUBLE_EQ(c.protocol.p, 60.0);
    EXPECT_EQ(c.epochs, 5u);
}

TEST(Config, ErrorsCarryLineContext) {
    try {
        parse_config("nodes=100\nfrobnicate=3\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("config:2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("frobnicate"), std::string::npos);
    }
    EXPECT_THROW(parse_config("nodes=abc\n"), ConfigError);
    EXPECT_THROW(parse_config("nodes 100\n"), ConfigError);
    EXPECT_THROW(parse_config("nodes=100\nnodes=200\n"), ConfigError);
}

TEST(Config, ProtocolRequirements) {
    EXPECT_THROW(parse_config("protocol=FixedProbability\n"), ConfigError);
    EXPECT_THROW(parse_config("protocol=Broadcast\np=50\n"), ConfigError);
    EXPECT_THROW(parse_config("protocol=FixedProbability\np=50\nfanout=2\n"), ConfigError);
    EXPECT_THROW(parse_config("protocol=FixedProbability\np=150\n"), ConfigError);
    EXPECT_THROW(parse_config("hub_count=10\n"), ConfigError);
    EXPECT_NO_THROW(parse_config("protocol=DegreeDependent\nddf_x=0.3\nddf_mode=exp\n"));
}

TEST(Config, FailsafeDefaults) {
    auto dpp = parse_config("protocol=DandelionPP\nrelayer_fraction=0.8\n");
    EXPECT_TRUE(dpp.protocol.failsafe_enabled);
    EXPECT_EQ(dpp.effective_max_steps(), 240u);  // timeout 200 + 2 ttl
    auto d = parse_config("protocol=Dandelion\nstem_steps=4\n");
    EXPECT_FALSE(d.protocol.failsafe_enabled);
    auto dfs = parse_config("protocol=Dandelion\nstem_steps=4\nfailsafe=true\n");
    EXPECT_EQ(dfs.effective_max_steps(), 80u);  // 4 ttl
}

TEST(Config, RoundTrip) {
    for (const char* text : {
             "protocol=FixedProbability\np=60\n",
             "protocol=DegreeDependent\nddf_x=1.23456789\nddf_mode=log\n",
             "topology=hierarchical\nhub_count=12\nprotocol=DandelionPP\nrelayer_fraction=0.3\n",
             "protocol=Dandelion\nstem_steps=8\nfailsafe=true\nfailsafe_timeout=9\nmax_steps=50\n",
             "protocol=FixedFanout\nfanout=4\nattach_count=9\nseed=77\n",
         }) {
        auto c = parse_config(text);
        auto text2 = serialize_config(c);
        EXPECT_EQ(serialize_config(parse_config(text2)), text2) << text;
    }
    auto c = parse_config("protocol=FixedProbability\np=60\n");
    EXPECT_DOUBLE_EQ(parse_config(serialize_config(c)).protocol.p, 60.0);
}

TEST(Config, HashIgnoresSeedOnly) {
    auto a = parse_config("seed=1\n");
    auto b = parse_config("seed=2\n");
    auto c = parse_config("seed=1\nttl=15\n");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_NE(config_hash(a), config_hash(c));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, OverridesReplaceFileValues) {
    ConfigBuilder b;
    b.add_text("protocol=FixedProbability\np=40\n");
    b.set("p", "70");
    EXPECT_DOUBLE_EQ(b.build().protocol.p, 70.0);
}

TEST(Config, AttachCountFollowsTopology) {
    EXPECT_EQ(parse_config("avg_degree=8\n").effective_attach_count(), 8u);
    // Hubs refill their own spokes, so joiners replace only non-hub links:
    // (120000 - 2*80*275) / 7920 = 9.6
    EXPECT_EQ(parse_config("topology=hierarchical\n").effective_attach_count(), 10u);
}

TEST(Config, CrossFieldValidation) {
    EXPECT_THROW(parse_config("ttl=30\nmax_steps=20\n"), ConfigError);
    EXPECT_THROW(parse_config("nodes=10\navg_degree=9\n"), ConfigError);
    EXPECT_THROW(parse_config("topology=hierarchical\ntotal_entries=1000\n"), ConfigError);
    EXPECT_THROW(parse_config("topology=hierarchical\navg_degree=12\n"), ConfigError);
}

TEST(Config, TuningMayOmitTunedParameter) {
    ConfigBuilder b;
    b.add_text("protocol=FixedProbability\n");
    EXPECT_THROW(b.build(), ConfigError);
    EXPECT_NO_THROW(b.build(true));
    ConfigBuilder d;
    d.add_text("protocol=Dandelion\n");
    EXPECT_THROW(d.build(true), ConfigError);
}
