#pragma once

#include "polref/artifact.hpp"
#include "polref/capability.hpp"
#include "polref/topology.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polref {

// A synthetic flow, checked against artifacts without any packet processing.
struct FlowSpec {
    Ipv4Address src_ip;
    Ipv4Address dst_ip;
    std::optional<std::string> l7_host;
};

struct PathVerdict {
    Path path;
    std::optional<std::string> blocked_by;  // first device on the path that drops the flow

    bool blocked() const { return blocked_by.has_value(); }
    bool operator==(const PathVerdict&) const = default;
};

/// True when every condition of the artifact holds for the flow. Host conditions only
/// count on application-layer controls; state conditions are not evaluated.
bool artifact_matches(const RuleArtifact& artifact, const Catalog& catalog, const FlowSpec& flow);

/// Walks each subject->object path and records the first blocking device.
/// Throws UnknownEndpoint, or ValidationError when src and dst coincide.
std::vector<PathVerdict> evaluate_flow(const Topology& topology, const std::vector<RuleArtifact>& artifacts,
                                       const Catalog& catalog, const FlowSpec& flow, std::string_view subject,
                                       std::string_view object);

struct VerificationReport {
    bool fully_blocked = true;
    std::vector<PathVerdict> verdicts;
    std::vector<Path> bypasses;  // paths on which the flow is allowed

    std::string text() const;
};

/// Fully blocked iff no path lets the flow through; an empty path set passes vacuously
/// with a warning.
VerificationReport verify_deployment(const Topology& topology, const std::vector<RuleArtifact>& artifacts,
                                     const Catalog& catalog, const FlowSpec& flow, std::string_view subject,
                                     std::string_view object);

}  // namespace polref
