#include "polref/refiner.hpp"

#include "polref/log.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace polref {
namespace {

constexpr std::string_view kForwardStates = "NEW,ESTABLISHED";
constexpr std::string_view kReverseStates = "ESTABLISHED,RELATED";

// Coverage of one candidate device over the path list, one bit per path.
using Bits = std::vector<std::uint64_t>;

void set_bit(Bits& bits, std::size_t i) { bits[i / 64] |= std::uint64_t{1} << (i % 64); }

bool covers_all(const Bits& bits, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
        if ((bits[i / 64] >> (i % 64) & 1U) == 0) return false;
    return true;
}

std::vector<std::size_t> exact_cover(const std::vector<Bits>& coverage, std::size_t path_count) {
    const std::size_t n = coverage.size();
    const std::size_t words = (path_count + 63) / 64;
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<std::size_t> idx(k);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (;;) {
            Bits acc(words, 0);
            for (auto i : idx)
                for (std::size_t w = 0; w < words; ++w) acc[w] |= coverage[i][w];
            if (covers_all(acc, path_count)) return idx;

            // Next k-combination of [0, n) in lexicographic order.
            std::size_t pos = k;
            while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return {};
}

std::vector<std::size_t> greedy_cover(const std::vector<Bits>& coverage, std::size_t path_count) {
    std::vector<bool> covered(path_count, false);
    std::vector<std::size_t> picked;
    std::size_t remaining = path_count;
    while (remaining > 0) {
        std::size_t best = coverage.size();
        std::size_t best_gain = 0;
        for (std::size_t c = 0; c < coverage.size(); ++c) {
            std::size_t gain = 0;
            for (std::size_t p = 0; p < path_count; ++p)
                if (!covered[p] && (coverage[c][p / 64] >> (p % 64) & 1U)) ++gain;
            if (gain > best_gain) {
                best = c;
                best_gain = gain;
            }
        }
        if (best == coverage.size()) break;
        picked.push_back(best);
        for (std::size_t p = 0; p < path_count; ++p) {
            if (!covered[p] && (coverage[best][p / 64] >> (p % 64) & 1U)) {
                covered[p] = true;
                --remaining;
            }
        }
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

std::string action_keyword(CapabilityId action) {
    return action == CapabilityId::DropActionCapability ? "drop" : "deny";
}

CapabilityId required_action(const RequiredSet& required) {
    for (auto id : required.capabilities)
        if (is_action(id)) return id;
    throw std::logic_error("requirement without action capability");
}

}  // namespace

std::vector<IntentBinding> bind_intent(const Topology& topology, const HsplPolicy& intent,
                                       const Knowledge& knowledge) {
    const Node& subject = resolve_endpoint(topology, intent.subject);
    const Node& object = resolve_endpoint(topology, intent.object);

    std::vector<IntentBinding> out;
    auto add = [&](IntentBinding binding) {
        bool duplicate = std::any_of(out.begin(), out.end(), [&](const IntentBinding& b) {
            return b.required == binding.required && b.conditions == binding.conditions;
        });
        if (!duplicate) out.push_back(std::move(binding));
    };

    for (const auto& fact : knowledge.facts()) {
        std::vector<RequiredSet> requirements;
        try {
            requirements = derive_required(fact);
        } catch (const Error&) {
            log::warn("refiner", "fact_skipped", {{"hsplid", intent.id}, {"reason", "no derivable requirement"}});
            continue;
        }
        for (const auto& required : requirements) {
            if (required.layer == Layer::Network) {
                bool relevant = false;
                for (const char* slot : {"source-ip-address", "destination-ip-address"}) {
                    auto it = fact.bindings.find(slot);
                    if (it == fact.bindings.end()) continue;
                    auto ip = Ipv4Address::parse(it->second);
                    if (ip && (ip == subject.ip || ip == object.ip)) relevant = true;
                }
                if (!relevant) {
                    log::warn("refiner", "fact_irrelevant", {{"hsplid", intent.id}, {"layer", "network"}});
                    continue;
                }
                if (!subject.ip || !object.ip) {
                    log::warn("refiner", "endpoint_without_ip", {{"hsplid", intent.id}});
                    continue;
                }
                add(IntentBinding{fact, required,
                                  {ConditionBinding{Direction::Forward, subject.ip, object.ip, std::nullopt},
                                   ConditionBinding{Direction::Reverse, object.ip, subject.ip, std::nullopt}}});
            } else {
                auto host = to_lower(fact.bindings.at("url"));
                if (!object.domains.contains(host)) {
                    log::warn("refiner", "fact_irrelevant", {{"hsplid", intent.id}, {"layer", "application"}, {"host", host}});
                    continue;
                }
                add(IntentBinding{fact, required,
                                  {ConditionBinding{Direction::Forward, std::nullopt, std::nullopt, host}}});
            }
        }
    }
    if (out.empty())
        throw Error(Errc::NothingToEnforce, "no fact concerns intent '" + intent.id + "' (" + intent.subject + " -> " +
                                                intent.object + ")");
    return out;
}

std::map<std::string, std::string> capable_devices(const Path& path, const Topology& topology,
                                                   const Catalog& catalog, const RequiredSet& required) {
    std::map<std::string, std::string> out;
    for (const auto& hop : path.hops) {
        const Node* node = topology.find(hop);
        if (node == nullptr || node->kind != NodeKind::Device) continue;
        for (const auto& control : node->controls) {
            const ControlSpec* spec = catalog.find(control);
            if (spec != nullptr && control_satisfies(*spec, required)) {
                out.emplace(hop, control);
                break;
            }
        }
    }
    return out;
}

Selection select_enforcement_set(const std::vector<Path>& paths, const Topology& topology,
                                 const Catalog& catalog, const RequiredSet& required, SelectOptions options) {
    Selection selection;
    if (paths.empty()) return selection;

    std::map<std::string, std::string> chosen_control;
    std::map<std::string, std::vector<std::size_t>> paths_of;
    for (std::size_t p = 0; p < paths.size(); ++p) {
        auto capable = capable_devices(paths[p], topology, catalog, required);
        if (capable.empty()) {
            throw UnenforceableError("no device on path " + to_string(paths[p]) + " can enforce the " +
                                         std::string(to_string(required.layer)) + "-layer requirement",
                                     paths[p]);
        }
        for (const auto& [device, control] : capable) {
            chosen_control.emplace(device, control);
            paths_of[device].push_back(p);
        }
    }

    std::vector<std::string> candidates;
    std::vector<Bits> coverage;
    const std::size_t words = (paths.size() + 63) / 64;
    for (const auto& [device, covered] : paths_of) {
        candidates.push_back(device);
        Bits bits(words, 0);
        for (auto p : covered) set_bit(bits, p);
        coverage.push_back(std::move(bits));
    }

    auto picked = options.greedy ? greedy_cover(coverage, paths.size()) : exact_cover(coverage, paths.size());
    for (auto i : picked) {
        selection.devices.push_back(candidates[i]);
        selection.control[candidates[i]] = chosen_control.at(candidates[i]);
    }
    return selection;
}

std::vector<RuleArtifact> build_artifacts(const HsplPolicy& intent, const IntentBinding& binding,
                                          const Selection& selection, const Catalog& catalog) {
    std::vector<RuleArtifact> out;
    const auto action = required_action(binding.required);
    for (const auto& device : selection.devices) {
        const auto& control = selection.control.at(device);
        const ControlSpec* spec = catalog.find(control);
        if (spec == nullptr) throw Error(Errc::UnknownControl, "control '" + control + "' not in catalog");
        const bool with_state = spec->stateful && spec->capabilities.contains(CapabilityId::StateConditionCapability);

        for (auto direction : {Direction::Forward, Direction::Reverse}) {
            for (const auto& condition : binding.conditions) {
                if (condition.direction != direction) continue;
                RuleArtifact artifact{intent.id, device, control, {}};
                if (binding.required.layer == Layer::Network) {
                    artifact.capabilities.push_back(
                        {CapabilityId::IpSourceAddressConditionCapability, condition.source->to_string()});
                    artifact.capabilities.push_back(
                        {CapabilityId::IpDestinationAddressConditionCapability, condition.destination->to_string()});
                    if (with_state) {
                        artifact.capabilities.push_back(
                            {CapabilityId::StateConditionCapability,
                             std::string(direction == Direction::Forward ? kForwardStates : kReverseStates)});
                    }
                } else {
                    artifact.capabilities.push_back({CapabilityId::HttpHostHeaderConditionCapability, *condition.host});
                }
                artifact.capabilities.push_back({action, action_keyword(action)});
                out.push_back(std::move(artifact));
            }
        }
    }
    return out;
}

RefineResult refine(const Topology& topology, const std::vector<HsplPolicy>& intents, const Knowledge& knowledge,
                    const Catalog& catalog, const std::optional<KnowledgeBase>& kb, RefineOptions options) {
    RefineResult result;
    result.reconciled = kb_reconcile(kb, topology, intents);
    log::event("refiner", "inventory_ready",
               {{"step", "4"}, {"devices", std::to_string(result.reconciled.inventory.size())},
                {"reused", result.reconciled.report.inventory_hit ? "true" : "false"}});

    for (const auto& intent : intents) {
        const auto& paths = result.reconciled.paths.at(intent.id);
        IntentPlan plan{intent, bind_intent(topology, intent, knowledge), {}};
        log::event("refiner", "requirements_derived",
                   {{"step", "5"}, {"hsplid", intent.id}, {"bindings", std::to_string(plan.bindings.size())}});
        if (paths.empty()) log::warn("refiner", "no_paths", {{"hsplid", intent.id}});

        for (const auto& binding : plan.bindings) {
            auto selection = select_enforcement_set(paths, topology, catalog, binding.required, options.select);
            std::string devices;
            for (const auto& d : selection.devices) devices += (devices.empty() ? "" : ",") + d;
            log::event("refiner", "enforcement_selected",
                       {{"step", "6"}, {"hsplid", intent.id}, {"layer", std::string(to_string(binding.required.layer))},
                        {"devices", devices}});
            auto artifacts = build_artifacts(intent, binding, selection, catalog);
            result.artifacts.insert(result.artifacts.end(), artifacts.begin(), artifacts.end());
            plan.selections.push_back(std::move(selection));
        }
        result.plans.push_back(std::move(plan));
    }
    log::event("refiner", "artifacts_emitted", {{"step", "7"}, {"count", std::to_string(result.artifacts.size())}});

    result.kb = kb_update(kb, topology, intents, result.reconciled.paths);
    return result;
}

}  // namespace polref
