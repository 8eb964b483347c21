#include "support.hpp"

#include "polref/extractor.hpp"
#include "polref/hspl.hpp"
#include "polref/knowledge_base.hpp"
#include "polref/refiner.hpp"

#include <gtest/gtest.h>

using namespace polref;
using testsupport::read_fixture;

namespace {

struct Scenario {
    Topology topology;
    std::vector<HsplPolicy> intents;
    Knowledge knowledge;
};

Scenario load(const std::string& dir) {
    return {parse_topology(read_fixture(dir + "/topology.yaml")), parse_hspl(read_fixture(dir + "/hspl.xml")),
            parse_knowledge(read_fixture(dir + "/knowledge.json"))};
}

RequiredSet network_required() { return derive_required({"entity", {{"destination-ip-address", "1.2.3.4"}}})[0]; }
RequiredSet application_required() { return derive_required({"entity", {{"url", "a.example.com"}}})[0]; }

}  // namespace

// hspl

TEST(Hspl, ParsesListing) {
    auto intents = parse_hspl(read_fixture("scenario1/hspl.xml"));
    ASSERT_EQ(intents.size(), 1u);
    EXPECT_EQ(intents[0], (HsplPolicy{"hspl1", "Eve", HsplAction::DenyAccess, "Bob"}));
}

TEST(Hspl, Batch) {
    auto intents = parse_hspl(
        "<policies><hspl id=\"a\"><subject>X</subject><action>is not authorized to access</action>"
        "<object>Y</object></hspl><hspl id=\"b\"><subject>Y</subject>"
        "<action>is not authorized to access</action><object>X</object></hspl></policies>");
    EXPECT_EQ(intents.size(), 2u);
}

TEST(Hspl, Errors) {
    auto code_of = [](const std::string& doc) {
        try {
            parse_hspl(doc);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::IoError;
    };
    EXPECT_EQ(code_of("<hspl id=\"a\"><subject>X</subject><action>may access</action><object>Y</object></hspl>"),
              Errc::UnsupportedAction);
    EXPECT_EQ(code_of("<hspl id=\"a\"><subject>X</subject><action>is not authorized to access</action>"
                      "<object>X</object></hspl>"),
              Errc::ValidationError);
    EXPECT_EQ(code_of("<hspl id=\"a\"><subject>X</subject></hspl>"), Errc::ValidationError);
    EXPECT_EQ(code_of("<hspl id=\"a\"><subject>X</subject"), Errc::SyntaxError);
}

// binding

TEST(Refiner, BindScenarioOne) {
    testsupport::QuietLogs quiet;
    auto s = load("scenario1");
    auto bindings = bind_intent(s.topology, s.intents[0], s.knowledge);
    ASSERT_EQ(bindings.size(), 1u);
    ASSERT_EQ(bindings[0].conditions.size(), 2u);
    EXPECT_EQ(bindings[0].conditions[0].source->to_string(), "80.71.158.96");
    EXPECT_EQ(bindings[0].conditions[0].destination->to_string(), "172.19.0.3");
    EXPECT_EQ(bindings[0].conditions[1].direction, Direction::Reverse);
    EXPECT_EQ(bindings[0].conditions[1].source->to_string(), "172.19.0.3");
}

TEST(Refiner, IrrelevantFactsAreSkipped) {
    testsupport::QuietLogs quiet;
    auto s = load("scenario1");
    auto k = s.knowledge.with_fact({"entity", {{"destination-ip-address", "9.9.9.9"}}});
    EXPECT_EQ(bind_intent(s.topology, s.intents[0], k).size(), 1u);
    EXPECT_TRUE(quiet.contains("level=warn"));

    Knowledge only_irrelevant = parse_knowledge(
        R"J({"templates": ["(deftemplate entity (slot destination-ip-address (type STRING)))"],
            "facts": ["(entity (destination-ip-address \"9.9.9.9\"))"]})J");
    try {
        bind_intent(s.topology, s.intents[0], only_irrelevant);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NothingToEnforce);
    }
}

// selection

TEST(Refiner, ScenarioOneSelection) {
    auto s = load("scenario1");
    auto paths = enumerate_paths(s.topology, "Eve", "Bob");
    auto sel = select_enforcement_set(paths, s.topology, default_catalog(), network_required());
    EXPECT_EQ(sel.devices, (std::vector<std::string>{"FW1", "FW3"}));
    EXPECT_EQ(sel.control.at("FW1"), "IpTables");
}

TEST(Refiner, ScenarioTwoSelection) {
    auto s = load("scenario2");
    auto paths = enumerate_paths(s.topology, "Alice", "WebServer");
    auto sel = select_enforcement_set(paths, s.topology, default_catalog(), application_required());
    EXPECT_EQ(sel.devices, std::vector<std::string>{"WAF"});
    EXPECT_EQ(sel.control.at("WAF"), "ModSecurity");
    // at the network layer a single shared firewall suffices
    auto net = select_enforcement_set(paths, s.topology, default_catalog(), network_required());
    EXPECT_EQ(net.devices, std::vector<std::string>{"FW3"});
}

TEST(Refiner, EmptyPathsSelectNothing) {
    auto s = load("scenario1");
    EXPECT_TRUE(select_enforcement_set({}, s.topology, default_catalog(), network_required()).devices.empty());
}

TEST(Refiner, UnenforceableNamesPath) {
    auto s = load("unenforceable");
    auto paths = enumerate_paths(s.topology, "Eve", "Bob");
    try {
        select_enforcement_set(paths, s.topology, default_catalog(), network_required());
        FAIL();
    } catch (const UnenforceableError& e) {
        EXPECT_EQ(e.code(), Errc::Unenforceable);
        EXPECT_EQ(e.path().hops, (std::vector<std::string>{"SubnetE", "Transit", "SubnetB"}));
    }
}

TEST(Refiner, SelectionMatchesSubsetOracle) {
    std::mt19937 rng(7);
    int checked = 0;
    for (int round = 0; round < 1000; ++round) {
        auto t = testsupport::random_topology(rng);
        auto paths = enumerate_paths(t, "S", "O");
        if (paths.empty() || paths.size() > 10) continue;
        std::set<std::vector<std::string>> path_set;
        for (const auto& p : paths) path_set.insert(p.hops);
        for (auto required : {network_required(), application_required()}) {
            auto oracle = testsupport::oracle_cover(t, path_set, default_catalog(), required);
            if (!oracle.feasible) {
                EXPECT_THROW(select_enforcement_set(paths, t, default_catalog(), required), UnenforceableError);
                continue;
            }
            auto sel = select_enforcement_set(paths, t, default_catalog(), required);
            EXPECT_EQ(sel.devices, oracle.first) << t.canonical_form();
            auto greedy = select_enforcement_set(paths, t, default_catalog(), required, {true});
            EXPECT_GE(greedy.devices.size(), oracle.optimum);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

// artifacts

TEST(Refiner, ArtifactsForScenarioOne) {
    testsupport::QuietLogs quiet;
    auto s = load("scenario1");
    auto result = refine(s.topology, s.intents, s.knowledge, default_catalog(), std::nullopt);
    ASSERT_EQ(result.artifacts.size(), 4u);
    const auto& a = result.artifacts[0];
    EXPECT_EQ(a.device, "FW1");
    EXPECT_EQ(a.nsf, "IpTables");
    ASSERT_EQ(a.capabilities.size(), 4u);
    EXPECT_EQ(a.capabilities[2], (CapabilityInstance{CapabilityId::StateConditionCapability, "NEW,ESTABLISHED"}));
    EXPECT_EQ(a.capabilities[3], (CapabilityInstance{CapabilityId::DropActionCapability, "drop"}));
    EXPECT_EQ(artifacts_from_json(artifacts_to_json(result.artifacts)), result.artifacts);
}

TEST(Refiner, StatelessControlOmitsState) {
    testsupport::QuietLogs quiet;
    auto s = load("scenario1");
    auto catalog = default_catalog();
    catalog.controls["IpTables"].stateful = false;
    auto result = refine(s.topology, s.intents, s.knowledge, catalog, std::nullopt);
    for (const auto& a : result.artifacts) EXPECT_EQ(a.find(CapabilityId::StateConditionCapability), nullptr);
}

TEST(Artifact, Validation) {
    RuleArtifact two_actions{"h", "D", "IpTables",
                             {{CapabilityId::DropActionCapability, "drop"}, {CapabilityId::DenyActionCapability, "deny"}}};
    EXPECT_THROW(validate_artifact(two_actions), Error);
    RuleArtifact no_action{"h", "D", "IpTables", {{CapabilityId::IpSourceAddressConditionCapability, "1.2.3.4"}}};
    EXPECT_THROW(validate_artifact(no_action), Error);
}

// knowledge base reuse

TEST(KnowledgeBase, ReuseAndInvalidation) {
    testsupport::QuietLogs quiet;
    auto s = load("scenario1");
    auto first = refine(s.topology, s.intents, s.knowledge, default_catalog(), std::nullopt);
    EXPECT_FALSE(first.reconciled.report.topology_match);
    EXPECT_EQ(first.reconciled.report.path_misses, std::vector<std::string>{"hspl1"});

    auto kb = parse_kb(serialize_kb(first.kb));
    EXPECT_EQ(kb, first.kb);
    auto second = refine(s.topology, s.intents, s.knowledge, default_catalog(), kb);
    EXPECT_TRUE(second.reconciled.report.topology_match);
    EXPECT_TRUE(second.reconciled.report.inventory_hit);
    EXPECT_EQ(second.reconciled.report.path_hits, std::vector<std::string>{"hspl1"});
    EXPECT_EQ(second.artifacts, first.artifacts);

    auto changed = parse_topology(read_fixture("scenario1/topology.yaml") + "  - [FW2, Subnet3]\n");
    auto third = refine(changed, s.intents, s.knowledge, default_catalog(), kb);
    EXPECT_FALSE(third.reconciled.report.topology_match);
    EXPECT_FALSE(third.reconciled.report.inventory_hit);
    EXPECT_EQ(third.reconciled.report.path_misses, std::vector<std::string>{"hspl1"});
    EXPECT_EQ(third.reconciled.paths.at("hspl1"), enumerate_paths(changed, "Eve", "Bob"));
}

TEST(KnowledgeBase, StaleCacheIsNotTrusted) {
    testsupport::QuietLogs quiet;
    auto s = load("scenario1");
    auto kb = refine(s.topology, s.intents, s.knowledge, default_catalog(), std::nullopt).kb;
    kb.paths["hspl1"].push_back(Path{{"SubnetE", "FW9"}});  // hash still matches, content does not
    auto r = kb_reconcile(kb, s.topology, s.intents);
    EXPECT_EQ(r.paths.at("hspl1"), enumerate_paths(s.topology, "Eve", "Bob"));
    EXPECT_EQ(r.report.path_misses, std::vector<std::string>{"hspl1"});
}

TEST(KnowledgeBase, CorruptDocument) {
    try {
        parse_kb("{\"topology_hash\": 3}");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::CorruptKnowledgeBase);
    }
}

TEST(KnowledgeBase, ChangedIntentMisses) {
    testsupport::QuietLogs quiet;
    auto s = load("scenario1");
    auto kb = refine(s.topology, s.intents, s.knowledge, default_catalog(), std::nullopt).kb;
    auto intents = s.intents;
    std::swap(intents[0].subject, intents[0].object);
    auto r = kb_reconcile(kb, s.topology, intents);
    EXPECT_EQ(r.report.path_misses, std::vector<std::string>{"hspl1"});
}
