#pragma once

#include "polref/artifact.hpp"
#include "polref/capability.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace polref {

enum class MatchOperator { ExactMatch, Range, Union };

std::string_view to_string(MatchOperator op);

enum class RuleAction { Drop, Deny };

std::string_view to_string(RuleAction action);

struct Condition {
    CapabilityId capability;
    MatchOperator op = MatchOperator::ExactMatch;
    // exactMatch: one value (state conditions: the member states in canonical order)
    // range: begin, end      union: two or more members
    std::vector<std::string> values;

    bool operator==(const Condition&) const = default;
};

struct MsplRule {
    std::string id;
    std::vector<Condition> conditions;  // canonical order: source, destination, state, host
    RuleAction action = RuleAction::Drop;

    const Condition* find(CapabilityId id) const;
    bool operator==(const MsplRule&) const = default;
};

struct MsplPolicy {
    std::string nsf_name;
    std::vector<MsplRule> rules;

    bool operator==(const MsplPolicy&) const = default;
};

/// Normalizes one capability detail. Addresses: "a" exact, "a-b" range (a <= b), "a,b,..." union.
/// States: comma list over NEW/ESTABLISHED/RELATED. Hosts: FQDN or comma list of FQDNs.
/// Throws NormalizationError.
Condition normalize_condition(CapabilityId capability, std::string_view detail);

MsplRule artifact_to_rule(const RuleArtifact& artifact);

/// One policy per device, artifact order preserved. Throws InconsistentNsf or NormalizationError.
std::map<std::string, MsplPolicy> build_mspl(const std::vector<RuleArtifact>& artifacts);

/// Throws UnknownControl or UnsupportedCapability when the policy's control cannot express a rule.
void validate_policy(const MsplPolicy& policy, const Catalog& catalog);

/// Element name for a capability, e.g. "ipSourceAddressConditionCapability".
std::string element_name(CapabilityId capability);

std::string serialize_mspl(const MsplPolicy& policy);

/// Throws SyntaxError or NormalizationError.
MsplPolicy parse_mspl(std::string_view document);

/// File name for a device's policy: "<device>.mspl.xml".
std::string mspl_file_name(std::string_view device);

}  // namespace polref
