#include "polref/capability.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>

namespace polref {
namespace {

constexpr std::array<std::pair<CapabilityId, std::string_view>, 6> kNames = {{
    {CapabilityId::IpSourceAddressConditionCapability, "IpSourceAddressConditionCapability"},
    {CapabilityId::IpDestinationAddressConditionCapability, "IpDestinationAddressConditionCapability"},
    {CapabilityId::StateConditionCapability, "StateConditionCapability"},
    {CapabilityId::HttpHostHeaderConditionCapability, "HttpHostHeaderConditionCapability"},
    {CapabilityId::DropActionCapability, "DropActionCapability"},
    {CapabilityId::DenyActionCapability, "DenyActionCapability"},
}};

void validate_control(const ControlSpec& control) {
    if (control.layer == Layer::Network && control.capabilities.contains(CapabilityId::HttpHostHeaderConditionCapability))
        throw Error(Errc::ValidationError,
                    "network-layer control '" + control.name + "' cannot list HttpHostHeaderConditionCapability");
    if (control.layer == Layer::Application && control.capabilities.contains(CapabilityId::StateConditionCapability))
        throw Error(Errc::ValidationError,
                    "application-layer control '" + control.name + "' cannot list StateConditionCapability");
}

}  // namespace

std::string_view to_string(CapabilityId id) {
    for (const auto& [value, name] : kNames)
        if (value == id) return name;
    return "Unknown";
}

std::optional<CapabilityId> parse_capability(std::string_view name) {
    for (const auto& [value, text] : kNames)
        if (text == name) return value;
    return std::nullopt;
}

bool is_action(CapabilityId id) {
    return id == CapabilityId::DropActionCapability || id == CapabilityId::DenyActionCapability;
}

const std::vector<CapabilityId>& all_capabilities() {
    static const std::vector<CapabilityId> all = [] {
        std::vector<CapabilityId> out;
        for (const auto& [value, name] : kNames) out.push_back(value);
        return out;
    }();
    return all;
}

std::string_view to_string(Layer layer) {
    return layer == Layer::Network ? "network" : "application";
}

const ControlSpec* Catalog::find(std::string_view name) const {
    auto it = controls.find(std::string(name));
    return it == controls.end() ? nullptr : &it->second;
}

Catalog load_catalog(std::string_view document) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::SyntaxError, std::string("catalog: ") + e.what());
    }
    if (!root.is_object()) throw Error(Errc::SyntaxError, "catalog must be a JSON object");

    Catalog catalog;
    for (const auto& [name, spec] : root.items()) {
        if (name.empty()) throw Error(Errc::ValidationError, "control with empty name");
        if (!spec.is_object()) throw Error(Errc::SyntaxError, "control '" + name + "' must be an object");
        ControlSpec control{name, Layer::Network, false, {}};

        const auto layer = spec.value("layer", std::string{});
        if (layer == "network") {
            control.layer = Layer::Network;
        } else if (layer == "application") {
            control.layer = Layer::Application;
        } else {
            throw Error(Errc::ValidationError, "control '" + name + "' has invalid layer '" + layer + "'");
        }
        if (spec.contains("stateful")) {
            if (!spec.at("stateful").is_boolean())
                throw Error(Errc::ValidationError, "control '" + name + "': stateful must be a boolean");
            control.stateful = spec.at("stateful").get<bool>();
        }
        if (spec.contains("capabilities")) {
            const auto& caps = spec.at("capabilities");
            if (!caps.is_array()) throw Error(Errc::ValidationError, "control '" + name + "': capabilities must be an array");
            for (const auto& cap : caps) {
                if (!cap.is_string()) throw Error(Errc::ValidationError, "control '" + name + "': capability names are strings");
                auto id = parse_capability(cap.get<std::string>());
                if (!id)
                    throw Error(Errc::ValidationError,
                                "control '" + name + "' lists unknown capability '" + cap.get<std::string>() + "'");
                control.capabilities.insert(*id);
            }
        }
        validate_control(control);
        catalog.controls.emplace(name, std::move(control));
    }
    return catalog;
}

std::string serialize_catalog(const Catalog& catalog) {
    nlohmann::ordered_json root = nlohmann::ordered_json::object();
    for (const auto& [name, control] : catalog.controls) {
        nlohmann::ordered_json caps = nlohmann::ordered_json::array();
        for (auto id : control.capabilities) caps.push_back(to_string(id));
        root[name] = {{"layer", to_string(control.layer)}, {"stateful", control.stateful}, {"capabilities", caps}};
    }
    return root.dump(2) + "\n";
}

Catalog default_catalog() {
    Catalog catalog;
    catalog.controls["IpTables"] = ControlSpec{
        "IpTables", Layer::Network, true,
        {CapabilityId::IpSourceAddressConditionCapability, CapabilityId::IpDestinationAddressConditionCapability,
         CapabilityId::StateConditionCapability, CapabilityId::DropActionCapability}};
    catalog.controls["ModSecurity"] = ControlSpec{
        "ModSecurity", Layer::Application, false,
        {CapabilityId::HttpHostHeaderConditionCapability, CapabilityId::DenyActionCapability}};
    return catalog;
}

std::vector<RequiredSet> derive_required(const Fact& fact) {
    std::vector<RequiredSet> out;
    bool has_ip = fact.bindings.contains("source-ip-address") || fact.bindings.contains("destination-ip-address");
    if (has_ip) {
        out.push_back(RequiredSet{Layer::Network,
                                  {CapabilityId::IpSourceAddressConditionCapability,
                                   CapabilityId::IpDestinationAddressConditionCapability,
                                   CapabilityId::DropActionCapability}});
    }
    if (fact.bindings.contains("url")) {
        out.push_back(RequiredSet{Layer::Application,
                                  {CapabilityId::HttpHostHeaderConditionCapability, CapabilityId::DenyActionCapability}});
    }
    if (out.empty()) throw Error(Errc::NoDerivableRequirement, "fact binds no address or url slot");
    return out;
}

bool control_satisfies(const ControlSpec& control, const RequiredSet& required) {
    if (control.layer != required.layer) return false;
    return std::includes(control.capabilities.begin(), control.capabilities.end(), required.capabilities.begin(),
                         required.capabilities.end());
}

}  // namespace polref
