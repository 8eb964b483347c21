#pragma once

#include "polref/hspl.hpp"
#include "polref/topology.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace polref {

using PathsByIntent = std::map<std::string, std::vector<Path>>;
using DeviceInventory = std::map<std::string, std::set<std::string>>;

// Results of earlier runs, keyed to the topology they were computed from.
struct KnowledgeBase {
    std::string topology_hash;
    std::map<std::string, HsplPolicy> intents;
    PathsByIntent paths;
    DeviceInventory device_inventory;

    bool operator==(const KnowledgeBase&) const = default;
};

/// SHA-256 of the topology's canonical form.
std::string topology_hash(const Topology& topology);

/// Every device with its controls.
DeviceInventory build_inventory(const Topology& topology);

/// Throws CorruptKnowledgeBase on malformed JSON or field inconsistency.
KnowledgeBase parse_kb(std::string_view document);
std::string serialize_kb(const KnowledgeBase& kb);

/// Missing file -> nullopt. A corrupt file is reported as a warning and also yields nullopt.
std::optional<KnowledgeBase> load_kb(const std::filesystem::path& path);
void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path);

/// Cross-checks a kb whose hash claims to match `topology`. Throws CorruptKnowledgeBase.
void validate_kb_against(const KnowledgeBase& kb, const Topology& topology);

struct ReuseReport {
    bool topology_match = false;
    bool inventory_hit = false;
    std::vector<std::string> path_hits;    // hsplids served from the kb
    std::vector<std::string> path_misses;  // hsplids recomputed

    bool operator==(const ReuseReport&) const = default;
};

struct Reconciled {
    PathsByIntent paths;
    DeviceInventory inventory;
    ReuseReport report;
};

/// Serves paths and inventory from `kb` when its hash matches `topology` and the intent is
/// unchanged; computes them otherwise. The returned paths and inventory do not depend on
/// whether they came from the cache.
Reconciled kb_reconcile(const std::optional<KnowledgeBase>& kb, const Topology& topology,
                        const std::vector<HsplPolicy>& intents);

/// Union of the old entries and the new ones. A hash change evicts all old paths.
KnowledgeBase kb_update(const std::optional<KnowledgeBase>& kb, const Topology& topology,
                        const std::vector<HsplPolicy>& intents, const PathsByIntent& paths);

}  // namespace polref
