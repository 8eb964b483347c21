#include "polref/verifier.hpp"

#include "polref/converter.hpp"
#include "polref/log.hpp"

#include <algorithm>

namespace polref {
namespace {

bool address_matches(const CapabilityInstance& instance, Ipv4Address ip) {
    Condition condition;
    try {
        condition = normalize_condition(instance.capability, instance.detail);
    } catch (const Error&) {
        return false;
    }
    switch (condition.op) {
        case MatchOperator::Range:
            return *Ipv4Address::parse(condition.values[0]) <= ip && ip <= *Ipv4Address::parse(condition.values[1]);
        default:
            return std::any_of(condition.values.begin(), condition.values.end(),
                               [&](const std::string& v) { return Ipv4Address::parse(v) == ip; });
    }
}

bool host_matches(const CapabilityInstance& instance, const std::optional<std::string>& host) {
    if (!host) return false;
    const auto wanted = to_lower(*host);
    Condition condition;
    try {
        condition = normalize_condition(instance.capability, instance.detail);
    } catch (const Error&) {
        return false;
    }
    return std::find(condition.values.begin(), condition.values.end(), wanted) != condition.values.end();
}

}  // namespace

bool artifact_matches(const RuleArtifact& artifact, const Catalog& catalog, const FlowSpec& flow) {
    const ControlSpec* control = catalog.find(artifact.nsf);
    for (const auto& instance : artifact.capabilities) {
        switch (instance.capability) {
            case CapabilityId::IpSourceAddressConditionCapability:
                if (!address_matches(instance, flow.src_ip)) return false;
                break;
            case CapabilityId::IpDestinationAddressConditionCapability:
                if (!address_matches(instance, flow.dst_ip)) return false;
                break;
            case CapabilityId::HttpHostHeaderConditionCapability:
                if (control == nullptr || control->layer != Layer::Application) return false;
                if (!host_matches(instance, flow.l7_host)) return false;
                break;
            default:
                break;
        }
    }
    return true;
}

std::vector<PathVerdict> evaluate_flow(const Topology& topology, const std::vector<RuleArtifact>& artifacts,
                                       const Catalog& catalog, const FlowSpec& flow, std::string_view subject,
                                       std::string_view object) {
    if (flow.src_ip == flow.dst_ip) throw Error(Errc::ValidationError, "flow source and destination coincide");
    std::vector<PathVerdict> verdicts;
    for (auto& path : enumerate_paths(topology, subject, object)) {
        PathVerdict verdict{path, std::nullopt};
        for (const auto& device : device_hops(topology, path)) {
            bool blocks = std::any_of(artifacts.begin(), artifacts.end(), [&](const RuleArtifact& a) {
                return a.device == device && artifact_matches(a, catalog, flow);
            });
            if (blocks) {
                verdict.blocked_by = device;
                break;
            }
        }
        verdicts.push_back(std::move(verdict));
    }
    return verdicts;
}

VerificationReport verify_deployment(const Topology& topology, const std::vector<RuleArtifact>& artifacts,
                                     const Catalog& catalog, const FlowSpec& flow, std::string_view subject,
                                     std::string_view object) {
    VerificationReport report;
    report.verdicts = evaluate_flow(topology, artifacts, catalog, flow, subject, object);
    if (report.verdicts.empty())
        log::warn("verifier", "no_paths", {{"subject", std::string(subject)}, {"object", std::string(object)}});
    for (const auto& verdict : report.verdicts) {
        if (!verdict.blocked()) {
            report.fully_blocked = false;
            report.bypasses.push_back(verdict.path);
        }
    }
    return report;
}

std::string VerificationReport::text() const {
    std::string out;
    for (const auto& verdict : verdicts) {
        out += "path " + to_string(verdict.path) + ": ";
        out += verdict.blocked() ? "BLOCKED at " + *verdict.blocked_by : std::string("ALLOWED");
        out += "\n";
    }
    if (verdicts.empty()) {
        out += "result: no paths (vacuously blocked)\n";
    } else if (fully_blocked) {
        out += "result: BLOCKED on all " + std::to_string(verdicts.size()) + " paths\n";
    } else {
        out += "result: BYPASS on " + std::to_string(bypasses.size()) + " of " + std::to_string(verdicts.size()) +
               " paths\n";
    }
    return out;
}

}  // namespace polref
