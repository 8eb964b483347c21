#include "support.hpp"

#include "polref/converter.hpp"
#include "polref/hspl.hpp"
#include "polref/refiner.hpp"
#include "polref/translator.hpp"
#include "polref/verifier.hpp"

#include <gtest/gtest.h>

using namespace polref;
using testsupport::read_fixture;

namespace {

const char* kListingIpTables =
    "iptables -A FORWARD -m conntrack --ctstate NEW,ESTABLISHED -s 80.71.158.96 -d 172.19.0.3 -j DROP\n"
    "iptables -A FORWARD -m conntrack --ctstate ESTABLISHED,RELATED -s 172.19.0.3 -d 80.71.158.96 -j DROP\n";
const char* kListingModSecurity =
    "SecRule REQUEST_HEADERS:Host \"@rx ^hadleyshope\\.3utilities\\.com$\" \\\n"
    "  \"deny, id:1\"\n";

struct Deployed {
    Topology topology;
    std::vector<RuleArtifact> artifacts;
};

Deployed deploy(const std::string& dir) {
    testsupport::QuietLogs quiet;
    auto topology = parse_topology(read_fixture(dir + "/topology.yaml"));
    auto result = refine(topology, parse_hspl(read_fixture(dir + "/hspl.xml")),
                         parse_knowledge(read_fixture(dir + "/knowledge.json")), default_catalog(), std::nullopt);
    return {topology, result.artifacts};
}

FlowSpec flow(const char* src, const char* dst, std::optional<std::string> host = std::nullopt) {
    return {*Ipv4Address::parse(src), *Ipv4Address::parse(dst), std::move(host)};
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::IoError;
}

}  // namespace

// converter

TEST(Converter, NormalizeAddresses) {
    auto c = normalize_condition(CapabilityId::IpSourceAddressConditionCapability, "10.0.0.1");
    EXPECT_EQ(c.op, MatchOperator::ExactMatch);
    c = normalize_condition(CapabilityId::IpSourceAddressConditionCapability, "10.0.0.1-10.0.0.9");
    EXPECT_EQ(c.op, MatchOperator::Range);
    EXPECT_EQ(c.values, (std::vector<std::string>{"10.0.0.1", "10.0.0.9"}));
    c = normalize_condition(CapabilityId::IpDestinationAddressConditionCapability, "10.0.0.1,10.0.0.2");
    EXPECT_EQ(c.op, MatchOperator::Union);
    EXPECT_EQ(code_of([] { normalize_condition(CapabilityId::IpSourceAddressConditionCapability, "10.0.0.9-10.0.0.1"); }),
              Errc::NormalizationError);
    EXPECT_EQ(code_of([] { normalize_condition(CapabilityId::IpSourceAddressConditionCapability, "10.0.0"); }),
              Errc::NormalizationError);
}

TEST(Converter, NormalizeStateAndHost) {
    auto c = normalize_condition(CapabilityId::StateConditionCapability, "ESTABLISHED,NEW");
    EXPECT_EQ(c.values, (std::vector<std::string>{"NEW", "ESTABLISHED"}));
    EXPECT_EQ(code_of([] { normalize_condition(CapabilityId::StateConditionCapability, "INVALID"); }),
              Errc::NormalizationError);
    c = normalize_condition(CapabilityId::HttpHostHeaderConditionCapability, "Hadleyshope.3Utilities.com");
    EXPECT_EQ(c.values, std::vector<std::string>{"hadleyshope.3utilities.com"});
    EXPECT_EQ(code_of([] { normalize_condition(CapabilityId::HttpHostHeaderConditionCapability, "not a host"); }),
              Errc::NormalizationError);
}

TEST(Converter, PolicyShape) {
    auto d = deploy("scenario1");
    auto policies = build_mspl(d.artifacts);
    ASSERT_EQ(policies.size(), 2u);
    const auto& fw1 = policies.at("FW1");
    EXPECT_EQ(fw1.nsf_name, "IpTables");
    ASSERT_EQ(fw1.rules.size(), 2u);
    EXPECT_EQ(fw1.rules[0].action, RuleAction::Drop);
    EXPECT_EQ(fw1.rules[0].conditions.size(), 3u);
}

TEST(Converter, MsplContainsExampleElement) {
    auto d = deploy("scenario1");
    auto xml = serialize_mspl(build_mspl(d.artifacts).at("FW1"));
    std::string compact;
    bool between_tags = false;
    for (char ch : xml) {
        if (ch == '>') between_tags = true;
        else if (ch == '<') between_tags = false;
        else if (between_tags && (ch == ' ' || ch == '\n')) continue;
        compact += ch;
    }
    EXPECT_NE(compact.find("<policy nsfName=\"IpTables\">"), std::string::npos);
    EXPECT_NE(compact.find("<ipSourceAddressConditionCapability operator=\"exactMatch\"><capabilityIpValue>"
                           "<exactMatch>80.71.158.96</exactMatch></capabilityIpValue>"
                           "</ipSourceAddressConditionCapability>"),
              std::string::npos);
}

TEST(Converter, RoundTripFixpoint) {
    for (auto dir : {"scenario1", "scenario2"}) {
        for (const auto& [device, policy] : build_mspl(deploy(dir).artifacts)) {
            auto text = serialize_mspl(policy);
            EXPECT_EQ(parse_mspl(text), policy) << device;
            EXPECT_EQ(serialize_mspl(parse_mspl(text)), text) << device;
        }
    }
    MsplPolicy rich{"IpTables",
                    {{"r", {normalize_condition(CapabilityId::IpSourceAddressConditionCapability, "10.0.0.1-10.0.0.5"),
                            normalize_condition(CapabilityId::IpDestinationAddressConditionCapability, "10.1.0.1,10.1.0.2")},
                      RuleAction::Drop}}};
    EXPECT_EQ(parse_mspl(serialize_mspl(rich)), rich);
}

TEST(Converter, Validation) {
    auto d = deploy("scenario1");
    auto policy = build_mspl(d.artifacts).at("FW1");
    policy.nsf_name = "Unknown";
    EXPECT_EQ(code_of([&] { validate_policy(policy, default_catalog()); }), Errc::UnknownControl);
    policy.nsf_name = "ModSecurity";
    EXPECT_EQ(code_of([&] { validate_policy(policy, default_catalog()); }), Errc::UnsupportedCapability);

    auto artifacts = d.artifacts;
    artifacts[1].nsf = "ModSecurity";
    EXPECT_EQ(code_of([&] { build_mspl(artifacts); }), Errc::InconsistentNsf);
}

// translator

TEST(Translator, ScenarioOneGolden) {
    for (const auto& [device, policy] : build_mspl(deploy("scenario1").artifacts))
        EXPECT_EQ(render_rules_file(translate_policy(policy)), kListingIpTables) << device;
}

TEST(Translator, ScenarioTwoGolden) {
    auto policies = build_mspl(deploy("scenario2").artifacts);
    ASSERT_EQ(policies.size(), 1u);
    EXPECT_EQ(render_rules_file(translate_policy(policies.at("WAF"))), kListingModSecurity);
}

TEST(Translator, RangeAndUnion) {
    MsplRule rule{"r",
                  {normalize_condition(CapabilityId::IpSourceAddressConditionCapability, "10.0.0.1-10.0.0.5"),
                   normalize_condition(CapabilityId::IpDestinationAddressConditionCapability, "10.1.0.1,10.1.0.2")},
                  RuleAction::Drop};
    auto rules = translate_policy(MsplPolicy{"IpTables", {rule}});
    ASSERT_EQ(rules.size(), 2u);
    EXPECT_EQ(rules[0].text, "iptables -A FORWARD -m iprange --src-range 10.0.0.1-10.0.0.5 -d 10.1.0.1 -j DROP");
    EXPECT_EQ(rules[1].text, "iptables -A FORWARD -m iprange --src-range 10.0.0.1-10.0.0.5 -d 10.1.0.2 -j DROP");
}

TEST(Translator, ModSecurityNumbering) {
    MsplRule a{"a", {normalize_condition(CapabilityId::HttpHostHeaderConditionCapability, "x.example.com,y.example.com")},
               RuleAction::Deny};
    auto rules = translate_policy(MsplPolicy{"ModSecurity", {a}});
    ASSERT_EQ(rules.size(), 2u);
    EXPECT_NE(rules[0].text.find("\"deny, id:1\""), std::string::npos);
    EXPECT_NE(rules[1].text.find("^y\\.example\\.com$"), std::string::npos);
    EXPECT_NE(rules[1].text.find("\"deny, id:2\""), std::string::npos);
}

TEST(Translator, EscapeRegex) { EXPECT_EQ(escape_regex("a.b-c+d"), "a\\.b-c\\+d"); }

TEST(Translator, RegistryChecksCatalog) {
    auto catalog = default_catalog();
    catalog.controls["Nftables"] = ControlSpec{"Nftables", Layer::Network, false, {CapabilityId::DropActionCapability}};
    EXPECT_EQ(code_of([&] { default_registry().check_catalog(catalog); }), Errc::ConfigError);
}

// verifier

TEST(Verifier, ScenarioOneBlocksBothDirections) {
    auto d = deploy("scenario1");
    auto forward = verify_deployment(d.topology, d.artifacts, default_catalog(), flow("80.71.158.96", "172.19.0.3"),
                                     "Eve", "Bob");
    EXPECT_TRUE(forward.fully_blocked);
    EXPECT_EQ(forward.verdicts.size(), 3u);
    auto reply = verify_deployment(d.topology, d.artifacts, default_catalog(), flow("172.19.0.3", "80.71.158.96"),
                                   "Bob", "Eve");
    EXPECT_TRUE(reply.fully_blocked);
    auto other = verify_deployment(d.topology, d.artifacts, default_catalog(), flow("10.5.5.5", "172.19.0.3"),
                                   "Eve", "Bob");
    EXPECT_FALSE(other.fully_blocked);
    EXPECT_EQ(other.bypasses.size(), 3u);
}

TEST(Verifier, ScenarioTwoHostDecides) {
    auto d = deploy("scenario2");
    auto bad = verify_deployment(d.topology, d.artifacts, default_catalog(),
                                 flow("10.0.1.10", "10.0.3.20", "hadleyshope.3utilities.com"), "Alice", "WebServer");
    EXPECT_TRUE(bad.fully_blocked);
    for (const auto& v : bad.verdicts) EXPECT_EQ(v.blocked_by, "WAF");
    auto good = verify_deployment(d.topology, d.artifacts, default_catalog(),
                                  flow("10.0.1.10", "10.0.3.20", "allowed.utilities.com"), "Alice", "WebServer");
    EXPECT_FALSE(good.fully_blocked);
    EXPECT_EQ(good.bypasses.size(), 2u);
}

TEST(Verifier, HostInvisibleAtNetworkLayer) {
    RuleArtifact host_on_firewall{"h", "FW1", "IpTables",
                                  {{CapabilityId::HttpHostHeaderConditionCapability, "bad.example.com"},
                                   {CapabilityId::DropActionCapability, "drop"}}};
    auto catalog = default_catalog();
    EXPECT_FALSE(artifact_matches(host_on_firewall, catalog, flow("1.1.1.1", "2.2.2.2", "bad.example.com")));
    EXPECT_FALSE(artifact_matches(host_on_firewall, catalog, flow("1.1.1.1", "2.2.2.2", "good.example.com")));
}

TEST(Verifier, SameEndpointsRejected) {
    auto d = deploy("scenario1");
    EXPECT_EQ(code_of([&] {
                  verify_deployment(d.topology, d.artifacts, default_catalog(), flow("1.1.1.1", "1.1.1.1"), "Eve", "Bob");
              }),
              Errc::ValidationError);
}
