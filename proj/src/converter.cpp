#include "polref/converter.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <array>
#include <sstream>

namespace polref {
namespace {

namespace pt = boost::property_tree;

constexpr std::array<std::string_view, 3> kStates = {"NEW", "ESTABLISHED", "RELATED"};

[[noreturn]] void bad(const std::string& message) { throw Error(Errc::NormalizationError, message); }

bool is_address(CapabilityId id) {
    return id == CapabilityId::IpSourceAddressConditionCapability ||
           id == CapabilityId::IpDestinationAddressConditionCapability;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = text.find(sep, start);
        out.emplace_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string upper(std::string_view text) {
    std::string out(text);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

Ipv4Address parse_address(const std::string& text) {
    auto ip = Ipv4Address::parse(text);
    if (!ip) bad("invalid IPv4 address '" + text + "'");
    return *ip;
}

// Checks values against the capability and operator; rewrites them into canonical spelling.
void canonicalize(Condition& condition) {
    const auto name = std::string(to_string(condition.capability));
    if (condition.values.empty()) bad(name + " has no value");
    switch (condition.capability) {
        case CapabilityId::IpSourceAddressConditionCapability:
        case CapabilityId::IpDestinationAddressConditionCapability: {
            for (auto& v : condition.values) v = parse_address(v).to_string();
            if (condition.op == MatchOperator::ExactMatch && condition.values.size() != 1) bad(name + ": exactMatch takes one value");
            if (condition.op == MatchOperator::Range) {
                if (condition.values.size() != 2) bad(name + ": range takes two values");
                if (parse_address(condition.values[1]) < parse_address(condition.values[0]))
                    bad(name + ": range begin exceeds end");
            }
            if (condition.op == MatchOperator::Union && condition.values.size() < 2) bad(name + ": union needs two members");
            break;
        }
        case CapabilityId::StateConditionCapability: {
            if (condition.op != MatchOperator::ExactMatch) bad(name + ": only exactMatch is supported");
            std::vector<std::string> ordered;
            for (auto& v : condition.values) {
                v = upper(v);
                if (std::find(kStates.begin(), kStates.end(), v) == kStates.end()) bad("unknown connection state '" + v + "'");
            }
            for (auto state : kStates)
                if (std::find(condition.values.begin(), condition.values.end(), state) != condition.values.end())
                    ordered.emplace_back(state);
            condition.values = std::move(ordered);
            break;
        }
        case CapabilityId::HttpHostHeaderConditionCapability: {
            if (condition.op == MatchOperator::Range) bad(name + ": range is not defined for hosts");
            for (auto& v : condition.values) {
                v = to_lower(v);
                if (!is_valid_fqdn(v)) bad("invalid host '" + v + "'");
            }
            if (condition.op == MatchOperator::ExactMatch && condition.values.size() != 1) bad(name + ": exactMatch takes one value");
            if (condition.op == MatchOperator::Union && condition.values.size() < 2) bad(name + ": union needs two members");
            break;
        }
        case CapabilityId::DropActionCapability:
        case CapabilityId::DenyActionCapability:
            bad(name + " is an action, not a condition");
    }
}

void sort_conditions(std::vector<Condition>& conditions) {
    std::stable_sort(conditions.begin(), conditions.end(),
                     [](const Condition& a, const Condition& b) { return a.capability < b.capability; });
    for (std::size_t i = 1; i < conditions.size(); ++i) {
        if (conditions[i].capability == conditions[i - 1].capability)
            bad("repeated " + std::string(to_string(conditions[i].capability)));
    }
}

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string value_element(CapabilityId id) {
    if (is_address(id)) return "capabilityIpValue";
    if (id == CapabilityId::StateConditionCapability) return "capabilityStateValue";
    return "capabilityStringValue";
}

void write_condition(std::ostringstream& out, const Condition& condition) {
    const auto element = element_name(condition.capability);
    const auto value = value_element(condition.capability);
    out << "    <" << element << " operator=\"" << to_string(condition.op) << "\">\n";
    out << "      <" << value << ">\n";
    if (condition.capability == CapabilityId::StateConditionCapability) {
        for (const auto& state : condition.values) out << "        <state>" << escape(state) << "</state>\n";
    } else if (condition.op == MatchOperator::ExactMatch) {
        out << "        <exactMatch>" << escape(condition.values[0]) << "</exactMatch>\n";
    } else if (condition.op == MatchOperator::Range) {
        out << "        <range>\n";
        out << "          <start>" << escape(condition.values[0]) << "</start>\n";
        out << "          <end>" << escape(condition.values[1]) << "</end>\n";
        out << "        </range>\n";
    } else {
        out << "        <union>\n";
        for (const auto& member : condition.values) out << "          <elem>" << escape(member) << "</elem>\n";
        out << "        </union>\n";
    }
    out << "      </" << value << ">\n";
    out << "    </" << element << ">\n";
}

std::optional<CapabilityId> capability_for_element(std::string_view element) {
    for (auto id : all_capabilities())
        if (!is_action(id) && element_name(id) == element) return id;
    return std::nullopt;
}

std::string text_of(const pt::ptree& node) { return std::string(trim(node.data())); }

Condition read_condition(CapabilityId id, const pt::ptree& element) {
    Condition condition{id, MatchOperator::ExactMatch, {}};
    auto op = element.get<std::string>("<xmlattr>.operator", "exactMatch");
    if (op == "exactMatch") {
        condition.op = MatchOperator::ExactMatch;
    } else if (op == "range") {
        condition.op = MatchOperator::Range;
    } else if (op == "union") {
        condition.op = MatchOperator::Union;
    } else {
        bad("unknown operator '" + op + "'");
    }
    auto holder = element.get_child_optional(value_element(id));
    if (!holder) bad(element_name(id) + " lacks <" + value_element(id) + ">");
    if (id == CapabilityId::StateConditionCapability) {
        for (const auto& [name, child] : *holder)
            if (name == "state") condition.values.push_back(text_of(child));
    } else if (condition.op == MatchOperator::ExactMatch) {
        condition.values.push_back(text_of(holder->get_child("exactMatch", pt::ptree{})));
    } else if (condition.op == MatchOperator::Range) {
        condition.values.push_back(text_of(holder->get_child("range.start", pt::ptree{})));
        condition.values.push_back(text_of(holder->get_child("range.end", pt::ptree{})));
    } else {
        for (const auto& [name, child] : holder->get_child("union", pt::ptree{}))
            if (name == "elem") condition.values.push_back(text_of(child));
    }
    std::erase_if(condition.values, [](const std::string& v) { return v.empty(); });
    canonicalize(condition);
    return condition;
}

}  // namespace

std::string_view to_string(MatchOperator op) {
    switch (op) {
        case MatchOperator::ExactMatch: return "exactMatch";
        case MatchOperator::Range:      return "range";
        case MatchOperator::Union:      return "union";
    }
    return "unknown";
}

std::string_view to_string(RuleAction action) { return action == RuleAction::Drop ? "drop" : "deny"; }

const Condition* MsplRule::find(CapabilityId id) const {
    for (const auto& condition : conditions)
        if (condition.capability == id) return &condition;
    return nullptr;
}

Condition normalize_condition(CapabilityId capability, std::string_view detail) {
    Condition condition{capability, MatchOperator::ExactMatch, {}};
    auto text = std::string(trim(detail));
    if (text.empty()) bad(std::string(to_string(capability)) + " has an empty detail");
    if (is_address(capability)) {
        if (text.find(',') != std::string::npos) {
            condition.op = MatchOperator::Union;
            condition.values = split(text, ',');
        } else if (text.find('-') != std::string::npos) {
            condition.op = MatchOperator::Range;
            condition.values = split(text, '-');
        } else {
            condition.values = {text};
        }
    } else if (capability == CapabilityId::StateConditionCapability) {
        condition.values = split(text, ',');
    } else {
        condition.values = split(text, ',');
        if (condition.values.size() > 1) condition.op = MatchOperator::Union;
    }
    canonicalize(condition);
    return condition;
}

MsplRule artifact_to_rule(const RuleArtifact& artifact) {
    MsplRule rule{artifact.hsplid, {}, RuleAction::Drop};
    std::size_t actions = 0;
    for (const auto& instance : artifact.capabilities) {
        if (is_action(instance.capability)) {
            ++actions;
            rule.action = instance.capability == CapabilityId::DropActionCapability ? RuleAction::Drop : RuleAction::Deny;
            continue;
        }
        rule.conditions.push_back(normalize_condition(instance.capability, instance.detail));
    }
    if (actions != 1) bad("artifact for " + artifact.device + " must carry exactly one action");
    sort_conditions(rule.conditions);
    return rule;
}

std::map<std::string, MsplPolicy> build_mspl(const std::vector<RuleArtifact>& artifacts) {
    std::map<std::string, MsplPolicy> policies;
    for (const auto& artifact : artifacts) {
        auto [it, inserted] = policies.try_emplace(artifact.device, MsplPolicy{artifact.nsf, {}});
        if (!inserted && it->second.nsf_name != artifact.nsf)
            throw Error(Errc::InconsistentNsf, "device '" + artifact.device + "' assigned both " + it->second.nsf_name +
                                                   " and " + artifact.nsf);
        it->second.rules.push_back(artifact_to_rule(artifact));
    }
    return policies;
}

void validate_policy(const MsplPolicy& policy, const Catalog& catalog) {
    const ControlSpec* control = catalog.find(policy.nsf_name);
    if (control == nullptr) throw Error(Errc::UnknownControl, "control '" + policy.nsf_name + "' not in catalog");
    for (const auto& rule : policy.rules) {
        auto action = rule.action == RuleAction::Drop ? CapabilityId::DropActionCapability : CapabilityId::DenyActionCapability;
        if (!control->capabilities.contains(action))
            throw Error(Errc::UnsupportedCapability, policy.nsf_name + " lacks " + std::string(to_string(action)));
        for (const auto& condition : rule.conditions) {
            if (!control->capabilities.contains(condition.capability))
                throw Error(Errc::UnsupportedCapability,
                            policy.nsf_name + " lacks " + std::string(to_string(condition.capability)));
        }
    }
}

std::string element_name(CapabilityId capability) {
    std::string name(to_string(capability));
    name[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(name[0])));
    return name;
}

std::string serialize_mspl(const MsplPolicy& policy) {
    std::ostringstream out;
    out << "<?xml version='1.0' encoding='utf-8'?>\n";
    out << "<policy nsfName=\"" << escape(policy.nsf_name) << "\">\n";
    for (const auto& rule : policy.rules) {
        out << "  <rule id=\"" << escape(rule.id) << "\">\n";
        for (const auto& condition : rule.conditions) write_condition(out, condition);
        out << "    <actionCapability>" << to_string(rule.action) << "</actionCapability>\n";
        out << "  </rule>\n";
    }
    out << "</policy>\n";
    return out.str();
}

MsplPolicy parse_mspl(std::string_view document) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(document)};
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw Error(Errc::SyntaxError, "mspl line " + std::to_string(e.line()) + ": " + e.message());
    }
    auto root = tree.get_child_optional("policy");
    if (!root) throw Error(Errc::SyntaxError, "mspl document has no <policy> element");

    MsplPolicy policy;
    policy.nsf_name = root->get<std::string>("<xmlattr>.nsfName", "");
    if (policy.nsf_name.empty()) throw Error(Errc::SyntaxError, "<policy> lacks nsfName");
    for (const auto& [name, rule_node] : *root) {
        if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
        if (name != "rule") throw Error(Errc::SyntaxError, "unexpected <" + name + "> in <policy>");
        MsplRule rule;
        rule.id = rule_node.get<std::string>("<xmlattr>.id", "");
        if (rule.id.empty()) throw Error(Errc::SyntaxError, "<rule> lacks id");
        bool has_action = false;
        for (const auto& [child_name, child] : rule_node) {
            if (child_name == "<xmlattr>" || child_name == "<xmlcomment>") continue;
            if (child_name == "actionCapability") {
                auto action = text_of(child);
                if (action == "drop") {
                    rule.action = RuleAction::Drop;
                } else if (action == "deny") {
                    rule.action = RuleAction::Deny;
                } else {
                    bad("unknown action '" + action + "'");
                }
                has_action = true;
                continue;
            }
            auto id = capability_for_element(child_name);
            if (!id) throw Error(Errc::SyntaxError, "unknown capability element <" + child_name + ">");
            rule.conditions.push_back(read_condition(*id, child));
        }
        if (!has_action) throw Error(Errc::SyntaxError, "rule '" + rule.id + "' has no <actionCapability>");
        sort_conditions(rule.conditions);
        policy.rules.push_back(std::move(rule));
    }
    return policy;
}

std::string mspl_file_name(std::string_view device) { return std::string(device) + ".mspl.xml"; }

}  // namespace polref
