#pragma once

#include "polref/common.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace polref {

enum class NodeKind { Endpoint, Subnet, Device };

std::string_view to_string(NodeKind kind);

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Subnet;
    std::optional<Ipv4Address> ip;       // endpoints only
    std::set<std::string> domains;       // endpoints only, lowercased
    std::set<std::string> controls;      // devices only

    bool operator==(const Node&) const = default;
};

// Ordered intermediate hops between two endpoints, endpoints themselves excluded.
struct Path {
    std::vector<std::string> hops;

    auto operator<=>(const Path&) const = default;
    bool operator==(const Path&) const = default;
};

class Topology {
public:
    using Link = std::pair<std::string, std::string>;  // first < second

    Topology() = default;
    /// Validates every invariant; throws Error(ValidationError).
    Topology(std::string name, std::vector<Node> nodes, std::vector<Link> links);

    const std::string& name() const { return name_; }
    const std::map<std::string, Node>& nodes() const { return nodes_; }
    const std::set<Link>& links() const { return links_; }

    const Node* find(std::string_view id) const;
    const std::set<std::string>& neighbours(std::string_view id) const;

    /// Stable textual form (sorted nodes and links); input to the knowledge-base hash.
    std::string canonical_form() const;

    bool operator==(const Topology& other) const {
        return name_ == other.name_ && nodes_ == other.nodes_ && links_ == other.links_;
    }

private:
    std::string name_;
    std::map<std::string, Node> nodes_;
    std::set<Link> links_;
    std::map<std::string, std::set<std::string>, std::less<>> adjacency_;
};

/// Parses the YAML-style topology document. Throws Error(SyntaxError | ValidationError).
Topology parse_topology(std::string_view document);

/// The endpoint named `name`; throws Error(UnknownEndpoint).
const Node& resolve_endpoint(const Topology& topology, std::string_view name);

/// All simple paths between two endpoints, sorted lexicographically by hop sequence.
std::vector<Path> enumerate_paths(const Topology& topology, std::string_view subject,
                                  std::string_view object);

/// Hops of `path` that are device nodes, in order.
std::vector<std::string> device_hops(const Topology& topology, const Path& path);

std::string to_string(const Path& path);

}  // namespace polref
