#include "polref/knowledge_base.hpp"

#include "polref/io.hpp"
#include "polref/log.hpp"

#include <json.hpp>

#include <algorithm>

namespace polref {
namespace {

[[noreturn]] void corrupt(const std::string& message) { throw Error(Errc::CorruptKnowledgeBase, message); }

bool is_hex_digest(const std::string& text) {
    return text.size() == 64 && std::all_of(text.begin(), text.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

bool linked(const Topology& topology, const std::string& a, const std::string& b) {
    return topology.neighbours(a).contains(b);
}

}  // namespace

std::string topology_hash(const Topology& topology) { return io::sha256_hex(topology.canonical_form()); }

DeviceInventory build_inventory(const Topology& topology) {
    DeviceInventory inventory;
    for (const auto& [id, node] : topology.nodes())
        if (node.kind == NodeKind::Device) inventory.emplace(id, node.controls);
    return inventory;
}

KnowledgeBase parse_kb(std::string_view document) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        corrupt(std::string("kb is not valid JSON: ") + e.what());
    }
    KnowledgeBase kb;
    try {
        kb.topology_hash = root.at("topology_hash").get<std::string>();
        if (!is_hex_digest(kb.topology_hash)) corrupt("kb topology_hash is not a sha256 hex digest");
        for (const auto& [id, intent] : root.at("intents").items()) {
            HsplPolicy policy{id, intent.at("subject").get<std::string>(), HsplAction::DenyAccess,
                              intent.at("object").get<std::string>()};
            if (intent.at("action").get<std::string>() != kDenyAccessText) corrupt("kb intent '" + id + "' has unknown action");
            kb.intents.emplace(id, std::move(policy));
        }
        for (const auto& [id, paths] : root.at("paths").items()) {
            if (!kb.intents.contains(id)) corrupt("kb has paths for unknown intent '" + id + "'");
            auto& out = kb.paths[id];
            for (const auto& hops : paths) {
                Path path{hops.get<std::vector<std::string>>()};
                std::set<std::string> unique(path.hops.begin(), path.hops.end());
                if (unique.size() != path.hops.size()) corrupt("kb path for '" + id + "' is not simple");
                out.push_back(std::move(path));
            }
        }
        for (const auto& [device, controls] : root.at("device_inventory").items()) {
            auto list = controls.get<std::vector<std::string>>();
            kb.device_inventory.emplace(device, std::set<std::string>(list.begin(), list.end()));
        }
    } catch (const nlohmann::json::exception& e) {
        corrupt(std::string("kb field error: ") + e.what());
    }
    return kb;
}

std::string serialize_kb(const KnowledgeBase& kb) {
    nlohmann::ordered_json root;
    root["topology_hash"] = kb.topology_hash;
    root["intents"] = nlohmann::ordered_json::object();
    for (const auto& [id, intent] : kb.intents) {
        root["intents"][id] = {{"subject", intent.subject},
                               {"action", std::string(to_string(intent.action))},
                               {"object", intent.object}};
    }
    root["paths"] = nlohmann::ordered_json::object();
    for (const auto& [id, paths] : kb.paths) {
        auto& list = root["paths"][id] = nlohmann::ordered_json::array();
        for (const auto& path : paths) list.push_back(path.hops);
    }
    root["device_inventory"] = nlohmann::ordered_json::object();
    for (const auto& [device, controls] : kb.device_inventory)
        root["device_inventory"][device] = std::vector<std::string>(controls.begin(), controls.end());
    return root.dump(2) + "\n";
}

std::optional<KnowledgeBase> load_kb(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        return parse_kb(io::read_file(path));
    } catch (const Error& e) {
        log::warn("refiner", "kb_ignored", {{"path", path.string()}, {"reason", e.what()}});
        return std::nullopt;
    }
}

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path) {
    io::write_file_atomic(path, serialize_kb(kb));
}

void validate_kb_against(const KnowledgeBase& kb, const Topology& topology) {
    if (kb.device_inventory != build_inventory(topology)) corrupt("kb device inventory disagrees with its topology hash");
    for (const auto& [id, paths] : kb.paths) {
        const auto& intent = kb.intents.at(id);
        for (const auto& path : paths) {
            std::string previous = intent.subject;
            for (const auto& hop : path.hops) {
                if (topology.find(hop) == nullptr || !linked(topology, previous, hop))
                    corrupt("kb path " + to_string(path) + " for '" + id + "' is not in the topology");
                previous = hop;
            }
            if (!linked(topology, previous, intent.object))
                corrupt("kb path " + to_string(path) + " for '" + id + "' does not reach " + intent.object);
        }
    }
}

Reconciled kb_reconcile(const std::optional<KnowledgeBase>& kb, const Topology& topology,
                        const std::vector<HsplPolicy>& intents) {
    const auto hash = topology_hash(topology);
    const KnowledgeBase* usable = nullptr;
    if (kb && kb->topology_hash == hash) {
        try {
            validate_kb_against(*kb, topology);
            usable = &*kb;
        } catch (const Error& e) {
            log::warn("refiner", "kb_corrupt", {{"reason", e.what()}});
        }
    } else if (kb) {
        log::event("refiner", "kb_topology_changed", {{"kb_hash", kb->topology_hash}, {"hash", hash}});
    }

    Reconciled out;
    out.report.topology_match = usable != nullptr;
    if (usable != nullptr) {
        out.inventory = usable->device_inventory;
        out.report.inventory_hit = true;
    } else {
        out.inventory = build_inventory(topology);
    }

    for (const auto& intent : intents) {
        if (usable != nullptr) {
            auto known = usable->intents.find(intent.id);
            auto cached = usable->paths.find(intent.id);
            if (known != usable->intents.end() && known->second == intent && cached != usable->paths.end()) {
                out.paths[intent.id] = cached->second;
                out.report.path_hits.push_back(intent.id);
                log::event("refiner", "paths_reused", {{"hsplid", intent.id}, {"count", std::to_string(cached->second.size())}});
                continue;
            }
        }
        out.paths[intent.id] = enumerate_paths(topology, intent.subject, intent.object);
        out.report.path_misses.push_back(intent.id);
        log::event("refiner", "paths_computed",
                   {{"hsplid", intent.id}, {"count", std::to_string(out.paths[intent.id].size())}});
    }
    return out;
}

KnowledgeBase kb_update(const std::optional<KnowledgeBase>& kb, const Topology& topology,
                        const std::vector<HsplPolicy>& intents, const PathsByIntent& paths) {
    const auto hash = topology_hash(topology);
    KnowledgeBase next;
    if (kb) {
        next.intents = kb->intents;
        if (kb->topology_hash == hash) next.paths = kb->paths;
    }
    next.topology_hash = hash;
    next.device_inventory = build_inventory(topology);
    for (const auto& intent : intents) {
        next.intents[intent.id] = intent;
        auto it = paths.find(intent.id);
        if (it != paths.end()) {
            next.paths[intent.id] = it->second;
        } else {
            next.paths.erase(intent.id);
        }
    }
    return next;
}

}  // namespace polref
