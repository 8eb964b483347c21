#pragma once

#include "polref/capability.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace polref {

// One capability with its value payload: an address, a comma-joined state set,
// a host name, or an action keyword.
struct CapabilityInstance {
    CapabilityId capability;
    std::string detail;

    bool operator==(const CapabilityInstance&) const = default;
};

// One filtering rule to enforce on one device with one control.
struct RuleArtifact {
    std::string hsplid;
    std::string device;
    std::string nsf;
    std::vector<CapabilityInstance> capabilities;

    const CapabilityInstance* find(CapabilityId id) const;
    bool operator==(const RuleArtifact&) const = default;
};

/// Checks exactly one action and at most one instance of each condition capability.
/// Throws ValidationError.
void validate_artifact(const RuleArtifact& artifact);

/// JSON array of {"hsplid", "device", "nsf", "capabilities": [{"capability", "detail"}]}.
std::string artifacts_to_json(const std::vector<RuleArtifact>& artifacts);
std::vector<RuleArtifact> artifacts_from_json(std::string_view document);

}  // namespace polref
