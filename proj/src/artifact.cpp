#include "polref/artifact.hpp"

#include <json.hpp>

#include <set>

namespace polref {

const CapabilityInstance* RuleArtifact::find(CapabilityId id) const {
    for (const auto& instance : capabilities)
        if (instance.capability == id) return &instance;
    return nullptr;
}

void validate_artifact(const RuleArtifact& artifact) {
    const auto where = "artifact " + artifact.hsplid + "@" + artifact.device;
    if (artifact.hsplid.empty() || artifact.device.empty() || artifact.nsf.empty())
        throw Error(Errc::ValidationError, where + ": hsplid, device and nsf are required");
    std::size_t actions = 0;
    std::set<CapabilityId> seen;
    for (const auto& instance : artifact.capabilities) {
        if (is_action(instance.capability)) {
            ++actions;
        } else if (!seen.insert(instance.capability).second) {
            throw Error(Errc::ValidationError, where + ": repeated " + std::string(to_string(instance.capability)));
        }
    }
    if (actions != 1)
        throw Error(Errc::ValidationError, where + ": expected exactly one action, found " + std::to_string(actions));
}

std::string artifacts_to_json(const std::vector<RuleArtifact>& artifacts) {
    nlohmann::ordered_json root = nlohmann::ordered_json::array();
    for (const auto& artifact : artifacts) {
        nlohmann::ordered_json caps = nlohmann::ordered_json::array();
        for (const auto& instance : artifact.capabilities) {
            nlohmann::ordered_json entry;
            entry["capability"] = to_string(instance.capability);
            entry["detail"] = instance.detail;
            caps.push_back(std::move(entry));
        }
        nlohmann::ordered_json entry;
        entry["hsplid"] = artifact.hsplid;
        entry["device"] = artifact.device;
        entry["nsf"] = artifact.nsf;
        entry["capabilities"] = std::move(caps);
        root.push_back(std::move(entry));
    }
    return root.dump(2) + "\n";
}

std::vector<RuleArtifact> artifacts_from_json(std::string_view document) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::SyntaxError, std::string("artifacts: ") + e.what());
    }
    if (!root.is_array()) throw Error(Errc::SyntaxError, "artifacts document must be a JSON array");

    std::vector<RuleArtifact> out;
    try {
        for (const auto& entry : root) {
            RuleArtifact artifact;
            artifact.hsplid = entry.at("hsplid").get<std::string>();
            artifact.device = entry.at("device").get<std::string>();
            artifact.nsf = entry.at("nsf").get<std::string>();
            for (const auto& cap : entry.at("capabilities")) {
                auto name = cap.at("capability").get<std::string>();
                auto id = parse_capability(name);
                if (!id) throw Error(Errc::ValidationError, "unknown capability '" + name + "'");
                artifact.capabilities.push_back({*id, cap.at("detail").get<std::string>()});
            }
            validate_artifact(artifact);
            out.push_back(std::move(artifact));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::SyntaxError, std::string("artifacts: ") + e.what());
    }
    return out;
}

}  // namespace polref
