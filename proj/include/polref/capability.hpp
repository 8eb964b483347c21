#pragma once

#include "polref/factbase.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace polref {

// Declaration order is the canonical condition order used by artifacts and MSPL rules.
enum class CapabilityId {
    IpSourceAddressConditionCapability,
    IpDestinationAddressConditionCapability,
    StateConditionCapability,
    HttpHostHeaderConditionCapability,
    DropActionCapability,
    DenyActionCapability,
};

std::string_view to_string(CapabilityId id);
std::optional<CapabilityId> parse_capability(std::string_view name);
bool is_action(CapabilityId id);
const std::vector<CapabilityId>& all_capabilities();

enum class Layer { Network, Application };

std::string_view to_string(Layer layer);

struct ControlSpec {
    std::string name;
    Layer layer = Layer::Network;
    bool stateful = false;
    std::set<CapabilityId> capabilities;

    bool operator==(const ControlSpec&) const = default;
};

struct Catalog {
    std::map<std::string, ControlSpec> controls;

    const ControlSpec* find(std::string_view name) const;
    bool operator==(const Catalog&) const = default;
};

/// Parses and validates the catalog JSON. Throws SyntaxError or ValidationError.
Catalog load_catalog(std::string_view document);
std::string serialize_catalog(const Catalog& catalog);

/// IpTables (network, stateful) and ModSecurity (application).
Catalog default_catalog();

struct RequiredSet {
    Layer layer = Layer::Network;
    std::set<CapabilityId> capabilities;

    auto operator<=>(const RequiredSet&) const = default;
};

/// Requirements a fact imposes, network before application.
/// Throws NoDerivableRequirement when the fact binds no address or url slot.
std::vector<RequiredSet> derive_required(const Fact& fact);

bool control_satisfies(const ControlSpec& control, const RequiredSet& required);

}  // namespace polref
