#pragma once

#include "polref/artifact.hpp"
#include "polref/capability.hpp"
#include "polref/factbase.hpp"
#include "polref/hspl.hpp"
#include "polref/knowledge_base.hpp"
#include "polref/topology.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polref {

enum class Direction { Forward, Reverse };

// Concrete values a requirement is instantiated with for one traffic direction.
struct ConditionBinding {
    Direction direction = Direction::Forward;
    std::optional<Ipv4Address> source;
    std::optional<Ipv4Address> destination;
    std::optional<std::string> host;

    bool operator==(const ConditionBinding&) const = default;
};

struct IntentBinding {
    Fact fact;
    RequiredSet required;
    std::vector<ConditionBinding> conditions;
};

/// Pairs the intent with the facts that concern it. An address fact is relevant when its value
/// is the subject's or object's IP and yields forward and reverse bindings; a url fact is
/// relevant when the object serves that domain and yields one host binding. Other facts are
/// skipped with a warning. Throws UnknownEndpoint or NothingToEnforce.
std::vector<IntentBinding> bind_intent(const Topology& topology, const HsplPolicy& intent,
                                       const Knowledge& knowledge);

struct Selection {
    std::vector<std::string> devices;               // sorted
    std::map<std::string, std::string> control;     // device -> chosen control

    bool operator==(const Selection&) const = default;
};

struct SelectOptions {
    // Greedy max-coverage instead of exact search; not guaranteed minimal.
    bool greedy = false;
};

// Raised when some path has no device able to enforce the requirement.
class UnenforceableError : public Error {
public:
    UnenforceableError(const std::string& message, Path path)
        : Error(Errc::Unenforceable, message), path_(std::move(path)) {}

    const Path& path() const noexcept { return path_; }

private:
    Path path_;
};

/// Devices on `path` with a control that satisfies `required`, with that control
/// (first satisfying control in name order).
std::map<std::string, std::string> capable_devices(const Path& path, const Topology& topology,
                                                   const Catalog& catalog, const RequiredSet& required);

/// Minimum-cardinality device set hitting every path, searched by increasing size; among
/// equally small sets the lexicographically smallest sorted id tuple wins.
/// An empty path list yields an empty selection. Throws UnenforceableError.
Selection select_enforcement_set(const std::vector<Path>& paths, const Topology& topology,
                                 const Catalog& catalog, const RequiredSet& required,
                                 SelectOptions options = {});

/// Rule artifacts for one binding on the selected devices, ordered by device then direction.
std::vector<RuleArtifact> build_artifacts(const HsplPolicy& intent, const IntentBinding& binding,
                                          const Selection& selection, const Catalog& catalog);

struct RefineOptions {
    SelectOptions select;
};

struct IntentPlan {
    HsplPolicy intent;
    std::vector<IntentBinding> bindings;
    std::vector<Selection> selections;  // one per binding
};

struct RefineResult {
    std::vector<RuleArtifact> artifacts;
    std::vector<IntentPlan> plans;
    Reconciled reconciled;
    KnowledgeBase kb;
};

/// Full refinement of a batch of intents.
RefineResult refine(const Topology& topology, const std::vector<HsplPolicy>& intents,
                    const Knowledge& knowledge, const Catalog& catalog,
                    const std::optional<KnowledgeBase>& kb, RefineOptions options = {});

}  // namespace polref
