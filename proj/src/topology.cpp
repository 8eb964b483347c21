#include "polref/topology.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <regex>

namespace polref {
namespace {

const std::regex& node_id_pattern() {
    static const std::regex pattern("[A-Za-z0-9_.-]+");
    return pattern;
}

[[noreturn]] void invalid(const std::string& message) {
    throw Error(Errc::ValidationError, message);
}

std::string mark_suffix(const YAML::Node& node) {
    const auto mark = node.Mark();
    if (mark.is_null()) return {};
    return " (line " + std::to_string(mark.line + 1) + ")";
}

std::string scalar(const YAML::Node& node, std::string_view what) {
    if (!node.IsScalar()) invalid(std::string(what) + " must be a scalar" + mark_suffix(node));
    return node.as<std::string>();
}

std::vector<std::string> scalar_list(const YAML::Node& node, std::string_view what) {
    std::vector<std::string> out;
    if (!node || node.IsNull()) return out;
    if (!node.IsSequence()) invalid(std::string(what) + " must be a list" + mark_suffix(node));
    for (const auto& item : node) out.push_back(scalar(item, what));
    return out;
}

NodeKind parse_kind(const std::string& text, const YAML::Node& where) {
    if (text == "endpoint") return NodeKind::Endpoint;
    if (text == "subnet") return NodeKind::Subnet;
    if (text == "device") return NodeKind::Device;
    invalid("unknown node kind '" + text + "'" + mark_suffix(where));
}

Node parse_node(const YAML::Node& entry) {
    if (!entry.IsMap()) invalid("node entry must be a mapping" + mark_suffix(entry));
    Node node;
    bool has_kind = false;
    for (const auto& kv : entry) {
        const auto key = kv.first.as<std::string>();
        const YAML::Node& value = kv.second;
        if (key == "id") {
            node.id = scalar(value, "id");
        } else if (key == "kind") {
            node.kind = parse_kind(scalar(value, "kind"), value);
            has_kind = true;
        } else if (key == "ip") {
            auto text = scalar(value, "ip");
            auto ip = Ipv4Address::parse(text);
            if (!ip) invalid("invalid IPv4 address '" + text + "'" + mark_suffix(value));
            node.ip = *ip;
        } else if (key == "domains") {
            for (auto& domain : scalar_list(value, "domains")) {
                if (!is_valid_fqdn(domain)) invalid("invalid domain '" + domain + "'" + mark_suffix(value));
                node.domains.insert(to_lower(domain));
            }
        } else if (key == "controls") {
            for (auto& control : scalar_list(value, "controls")) node.controls.insert(control);
        } else {
            invalid("unknown node field '" + key + "'" + mark_suffix(kv.first));
        }
    }
    if (node.id.empty()) invalid("node without id" + mark_suffix(entry));
    if (!has_kind) invalid("node '" + node.id + "' has no kind" + mark_suffix(entry));
    return node;
}

}  // namespace

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Endpoint: return "endpoint";
        case NodeKind::Subnet:   return "subnet";
        case NodeKind::Device:   return "device";
    }
    return "unknown";
}

Topology::Topology(std::string name, std::vector<Node> nodes, std::vector<Link> links)
    : name_(std::move(name)) {
    for (auto& node : nodes) {
        if (!std::regex_match(node.id, node_id_pattern())) invalid("invalid node id '" + node.id + "'");
        if (node.ip && node.kind != NodeKind::Endpoint) invalid("node '" + node.id + "' has an ip but is not an endpoint");
        if (!node.domains.empty() && node.kind != NodeKind::Endpoint)
            invalid("node '" + node.id + "' has domains but is not an endpoint");
        if (!node.controls.empty() && node.kind != NodeKind::Device)
            invalid("node '" + node.id + "' has controls but is not a device");
        auto id = node.id;
        if (!nodes_.emplace(id, std::move(node)).second) invalid("duplicate node id '" + id + "'");
        adjacency_[id];
    }
    for (auto& [a, b] : links) {
        if (!nodes_.contains(a)) invalid("link references undeclared node '" + a + "'");
        if (!nodes_.contains(b)) invalid("link references undeclared node '" + b + "'");
        if (a == b) invalid("self-link on '" + a + "'");
        links_.insert(a < b ? Link{a, b} : Link{b, a});
    }
    for (const auto& [a, b] : links_) {
        adjacency_[a].insert(b);
        adjacency_[b].insert(a);
    }
    for (const auto& [id, node] : nodes_) {
        if (node.kind != NodeKind::Endpoint) continue;
        const auto& adjacent = adjacency_[id];
        for (const auto& other : adjacent) {
            if (nodes_.at(other).kind != NodeKind::Subnet)
                invalid("endpoint '" + id + "' links to non-subnet node '" + other + "'");
        }
        if (adjacent.size() != 1)
            invalid("endpoint '" + id + "' must attach to exactly one subnet, found " +
                    std::to_string(adjacent.size()));
    }
}

const Node* Topology::find(std::string_view id) const {
    auto it = nodes_.find(std::string(id));
    return it == nodes_.end() ? nullptr : &it->second;
}

const std::set<std::string>& Topology::neighbours(std::string_view id) const {
    static const std::set<std::string> none;
    auto it = adjacency_.find(id);
    return it == adjacency_.end() ? none : it->second;
}

std::string Topology::canonical_form() const {
    std::string out = "name " + name_ + "\n";
    for (const auto& [id, node] : nodes_) {
        out += "node " + id + " " + std::string(to_string(node.kind));
        if (node.ip) out += " ip=" + node.ip->to_string();
        for (const auto& domain : node.domains) out += " domain=" + domain;
        for (const auto& control : node.controls) out += " control=" + control;
        out += "\n";
    }
    for (const auto& [a, b] : links_) out += "link " + a + " " + b + "\n";
    return out;
}

Topology parse_topology(std::string_view document) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(document));
    } catch (const YAML::ParserException& e) {
        throw Error(Errc::SyntaxError,
                    "topology syntax error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (!root || root.IsNull()) return Topology{};
    if (!root.IsMap()) throw Error(Errc::SyntaxError, "topology document must be a mapping");

    try {
        std::string name;
        std::vector<Node> nodes;
        std::vector<Topology::Link> links;
        for (const auto& kv : root) {
            const auto key = kv.first.as<std::string>();
            const YAML::Node& value = kv.second;
            if (key == "name") {
                name = value.IsNull() ? std::string{} : scalar(value, "name");
            } else if (key == "nodes") {
                if (value.IsNull()) continue;
                if (!value.IsSequence()) invalid("nodes must be a list" + mark_suffix(value));
                for (const auto& entry : value) nodes.push_back(parse_node(entry));
            } else if (key == "links") {
                if (value.IsNull()) continue;
                if (!value.IsSequence()) invalid("links must be a list" + mark_suffix(value));
                for (const auto& entry : value) {
                    auto ends = scalar_list(entry, "link");
                    if (ends.size() != 2) invalid("link must name exactly two nodes" + mark_suffix(entry));
                    links.emplace_back(ends[0], ends[1]);
                }
            } else {
                invalid("unknown topology field '" + key + "'" + mark_suffix(kv.first));
            }
        }
        return Topology(std::move(name), std::move(nodes), std::move(links));
    } catch (const YAML::Exception& e) {
        throw Error(Errc::SyntaxError, "topology syntax error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
}

const Node& resolve_endpoint(const Topology& topology, std::string_view name) {
    const Node* node = topology.find(name);
    if (node == nullptr || node->kind != NodeKind::Endpoint)
        throw Error(Errc::UnknownEndpoint, "unknown endpoint '" + std::string(name) + "'");
    return *node;
}

std::vector<Path> enumerate_paths(const Topology& topology, std::string_view subject,
                                  std::string_view object) {
    resolve_endpoint(topology, subject);
    resolve_endpoint(topology, object);
    std::vector<Path> paths;
    if (subject == object) return paths;

    const std::string target(object);
    std::set<std::string, std::less<>> on_stack{std::string(subject)};
    std::vector<std::string> hops;

    // Iterative DFS: each frame is (node, next-neighbour iterator).
    using Iter = std::set<std::string>::const_iterator;
    std::vector<std::pair<Iter, Iter>> frames;
    const auto& first = topology.neighbours(subject);
    frames.emplace_back(first.begin(), first.end());

    while (!frames.empty()) {
        auto& [it, end] = frames.back();
        if (it == end) {
            frames.pop_back();
            if (!hops.empty()) {
                on_stack.erase(hops.back());
                hops.pop_back();
            }
            continue;
        }
        const std::string& next = *it++;
        if (on_stack.contains(next)) continue;
        if (next == target) {
            paths.push_back(Path{hops});
            continue;
        }
        if (topology.nodes().at(next).kind == NodeKind::Endpoint) continue;
        hops.push_back(next);
        on_stack.insert(next);
        const auto& adjacent = topology.neighbours(next);
        frames.emplace_back(adjacent.begin(), adjacent.end());
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

std::vector<std::string> device_hops(const Topology& topology, const Path& path) {
    std::vector<std::string> out;
    for (const auto& hop : path.hops) {
        const Node* node = topology.find(hop);
        if (node != nullptr && node->kind == NodeKind::Device) out.push_back(hop);
    }
    return out;
}

std::string to_string(const Path& path) {
    std::string out = "[";
    for (std::size_t i = 0; i < path.hops.size(); ++i) {
        if (i > 0) out += ", ";
        out += path.hops[i];
    }
    return out + "]";
}

}  // namespace polref
