#pragma once

// Shared test helpers: fixture access, log silencing, and brute-force oracles that do not
// reuse the library's search code.

#include "polref/capability.hpp"
#include "polref/io.hpp"
#include "polref/log.hpp"
#include "polref/topology.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testsupport {

inline std::filesystem::path fixture(const std::string& relative) {
    return std::filesystem::path(POLREF_FIXTURES) / relative;
}

inline std::string read_fixture(const std::string& relative) { return polref::io::read_file(fixture(relative)); }

struct QuietLogs {
    std::vector<std::string> lines;
    QuietLogs() {
        polref::log::set_sink([this](const std::string& line) { lines.push_back(line); });
    }
    ~QuietLogs() { polref::log::set_sink(nullptr); }
    bool contains(const std::string& needle) const {
        return std::any_of(lines.begin(), lines.end(), [&](const std::string& l) { return l.find(needle) != std::string::npos; });
    }
};

// Every ordered selection of distinct non-endpoint nodes is tried as a path; a candidate is
// kept when each consecutive pair is linked and both ends touch the endpoints.
inline std::set<std::vector<std::string>> oracle_paths(const polref::Topology& t, const std::string& a,
                                                       const std::string& b) {
    std::vector<std::string> inner;
    for (const auto& [id, node] : t.nodes())
        if (node.kind != polref::NodeKind::Endpoint) inner.push_back(id);
    auto linked = [&](const std::string& x, const std::string& y) {
        auto key = x < y ? std::make_pair(x, y) : std::make_pair(y, x);
        return t.links().count(key) > 0;
    };
    std::set<std::vector<std::string>> found;
    if (linked(a, b)) found.insert({});
    const std::size_t n = inner.size();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::string> chosen;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) chosen.push_back(inner[i]);
        std::sort(chosen.begin(), chosen.end());
        do {
            bool ok = linked(a, chosen.front()) && linked(chosen.back(), b);
            for (std::size_t i = 0; ok && i + 1 < chosen.size(); ++i) ok = linked(chosen[i], chosen[i + 1]);
            if (ok) found.insert(chosen);
        } while (std::next_permutation(chosen.begin(), chosen.end()));
    }
    return found;
}

inline bool device_can_enforce(const polref::Node& node, const polref::Catalog& catalog,
                               const polref::RequiredSet& required) {
    for (const auto& name : node.controls) {
        auto it = catalog.controls.find(name);
        if (it == catalog.controls.end() || it->second.layer != required.layer) continue;
        bool all = true;
        for (auto cap : required.capabilities) all = all && it->second.capabilities.count(cap) > 0;
        if (all) return true;
    }
    return false;
}

struct CoverOracle {
    bool feasible = false;
    std::size_t optimum = 0;
    std::vector<std::string> first;  // lexicographically smallest optimum
};

// Exhaustive subset search over every device of the topology.
inline CoverOracle oracle_cover(const polref::Topology& t, const std::set<std::vector<std::string>>& paths,
                                const polref::Catalog& catalog, const polref::RequiredSet& required) {
    std::vector<std::string> devices;
    for (const auto& [id, node] : t.nodes())
        if (node.kind == polref::NodeKind::Device) devices.push_back(id);
    CoverOracle result;
    for (std::uint32_t mask = 0; mask < (1u << devices.size()); ++mask) {
        std::vector<std::string> chosen;
        for (std::size_t i = 0; i < devices.size(); ++i)
            if (mask & (1u << i)) chosen.push_back(devices[i]);
        bool covers = true;
        for (const auto& path : paths) {
            bool hit = false;
            for (const auto& d : chosen)
                hit = hit || (std::find(path.begin(), path.end(), d) != path.end() &&
                              device_can_enforce(*t.find(d), catalog, required));
            covers = covers && hit;
        }
        if (!covers) continue;
        if (!result.feasible || chosen.size() < result.optimum ||
            (chosen.size() == result.optimum && chosen < result.first)) {
            result.feasible = true;
            result.optimum = chosen.size();
            result.first = chosen;
        }
    }
    return result;
}

inline const char* kSubjectIp = "10.9.0.1";
inline const char* kObjectIp = "10.9.0.2";
inline const char* kBadHost = "bad.example.com";
inline const char* kGoodHost = "good.example.com";

// Random instance: endpoints S and O hang off subnets SS and SO; devices D1..Dk and extra
// subnets N1..Nm are wired randomly among themselves and the two endpoint subnets.
inline polref::Topology random_topology(std::mt19937& rng, int max_devices = 8, int max_extra_subnets = 2) {
    using polref::Node;
    using polref::NodeKind;
    std::uniform_int_distribution<int> device_count(1, max_devices);
    std::uniform_int_distribution<int> subnet_count(0, max_extra_subnets);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const std::vector<std::set<std::string>> control_sets = {
        {}, {"IpTables"}, {"IpTables"}, {"ModSecurity"}, {"IpTables", "ModSecurity"}};
    std::uniform_int_distribution<std::size_t> pick(0, control_sets.size() - 1);

    std::vector<Node> nodes;
    nodes.push_back({"S", NodeKind::Endpoint, polref::Ipv4Address::parse(kSubjectIp), {}, {}});
    nodes.push_back({"O", NodeKind::Endpoint, polref::Ipv4Address::parse(kObjectIp), {kBadHost, kGoodHost}, {}});
    nodes.push_back({"SS", NodeKind::Subnet, {}, {}, {}});
    nodes.push_back({"SO", NodeKind::Subnet, {}, {}, {}});
    std::vector<std::string> inner = {"SS", "SO"};
    const int k = device_count(rng);
    for (int i = 1; i <= k; ++i) {
        nodes.push_back({"D" + std::to_string(i), NodeKind::Device, {}, {}, control_sets[pick(rng)]});
        inner.push_back("D" + std::to_string(i));
    }
    const int m = subnet_count(rng);
    for (int i = 1; i <= m; ++i) {
        nodes.push_back({"N" + std::to_string(i), NodeKind::Subnet, {}, {}, {}});
        inner.push_back("N" + std::to_string(i));
    }
    std::vector<polref::Topology::Link> links = {{"S", "SS"}, {"O", "SO"}};
    const double density = 0.2 + 0.3 * coin(rng);
    for (std::size_t i = 0; i < inner.size(); ++i)
        for (std::size_t j = i + 1; j < inner.size(); ++j) {
            if (inner[i] == "SS" && inner[j] == "SO") continue;
            if (coin(rng) < density) links.emplace_back(inner[i], inner[j]);
        }
    return polref::Topology("random", nodes, links);
}

}  // namespace testsupport
