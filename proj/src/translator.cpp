#include "polref/translator.hpp"

#include <algorithm>

namespace polref {
namespace {

[[noreturn]] void unsupported(const std::string& message) { throw Error(Errc::UnsupportedCapability, message); }

void require_concrete(const Condition& condition, std::string_view control) {
    if (condition.op == MatchOperator::Union)
        unsupported(std::string(control) + ": union on " + std::string(to_string(condition.capability)) +
                    " must be expanded before rendering");
}

std::string join(const std::vector<std::string>& values, char sep) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) out += sep;
        out += v;
    }
    return out;
}

}  // namespace

void RendererRegistry::add(std::string control, std::set<CapabilityId> supported, Renderer render) {
    entries_.insert_or_assign(std::move(control), Entry{std::move(supported), std::move(render)});
}

const RendererRegistry::Entry* RendererRegistry::find(std::string_view control) const {
    auto it = entries_.find(control);
    return it == entries_.end() ? nullptr : &it->second;
}

void RendererRegistry::check_catalog(const Catalog& catalog) const {
    for (const auto& [name, control] : catalog.controls) {
        const Entry* entry = find(name);
        if (entry == nullptr) throw Error(Errc::ConfigError, "no renderer registered for control '" + name + "'");
        for (auto id : control.capabilities) {
            if (!entry->supported.contains(id))
                throw Error(Errc::ConfigError,
                            "control '" + name + "' declares " + std::string(to_string(id)) + " but its renderer has no mapping");
        }
    }
}

const RendererRegistry& default_registry() {
    static const RendererRegistry registry = [] {
        RendererRegistry r;
        r.add("IpTables",
              {CapabilityId::IpSourceAddressConditionCapability, CapabilityId::IpDestinationAddressConditionCapability,
               CapabilityId::StateConditionCapability, CapabilityId::DropActionCapability},
              [](const MsplRule& rule, std::size_t) { return render_iptables(rule); });
        r.add("ModSecurity", {CapabilityId::HttpHostHeaderConditionCapability, CapabilityId::DenyActionCapability},
              [](const MsplRule& rule, std::size_t n) { return render_modsecurity(rule, n); });
        return r;
    }();
    return registry;
}

LowLevelRule render_iptables(const MsplRule& rule) {
    if (rule.action != RuleAction::Drop) unsupported("IpTables renderer only maps the drop action");
    const Condition* source = nullptr;
    const Condition* destination = nullptr;
    const Condition* state = nullptr;
    for (const auto& condition : rule.conditions) {
        require_concrete(condition, "IpTables");
        switch (condition.capability) {
            case CapabilityId::IpSourceAddressConditionCapability:      source = &condition; break;
            case CapabilityId::IpDestinationAddressConditionCapability: destination = &condition; break;
            case CapabilityId::StateConditionCapability:                state = &condition; break;
            default: unsupported("IpTables has no mapping for " + std::string(to_string(condition.capability)));
        }
    }

    std::string text = "iptables -A FORWARD";
    if (state != nullptr) text += " -m conntrack --ctstate " + join(state->values, ',');
    bool iprange_loaded = false;
    auto address = [&](const Condition* condition, std::string_view exact_flag, std::string_view range_flag) {
        if (condition == nullptr) return;
        if (condition->op == MatchOperator::Range) {
            if (!iprange_loaded) text += " -m iprange";
            iprange_loaded = true;
            text += " " + std::string(range_flag) + " " + condition->values[0] + "-" + condition->values[1];
        } else {
            text += " " + std::string(exact_flag) + " " + condition->values[0];
        }
    };
    address(source, "-s", "--src-range");
    address(destination, "-d", "--dst-range");
    text += " -j DROP";
    return LowLevelRule{"IpTables", std::move(text)};
}

LowLevelRule render_modsecurity(const MsplRule& rule, std::size_t rule_number) {
    if (rule.action != RuleAction::Deny) unsupported("ModSecurity renderer only maps the deny action");
    if (rule.conditions.size() != 1 || rule.conditions[0].capability != CapabilityId::HttpHostHeaderConditionCapability) {
        for (const auto& condition : rule.conditions) {
            if (condition.capability != CapabilityId::HttpHostHeaderConditionCapability)
                unsupported("ModSecurity has no mapping for " + std::string(to_string(condition.capability)));
        }
        unsupported("ModSecurity rule needs exactly one host condition");
    }
    const Condition& host = rule.conditions[0];
    require_concrete(host, "ModSecurity");
    std::string text = "SecRule REQUEST_HEADERS:Host \"@rx ^" + escape_regex(host.values[0]) + "$\" \\\n";
    text += "  \"deny, id:" + std::to_string(rule_number) + "\"";
    return LowLevelRule{"ModSecurity", std::move(text)};
}

std::string escape_regex(std::string_view text) {
    static constexpr std::string_view special = ".\\+*?()[]{}|^$";
    std::string out;
    for (char c : text) {
        if (special.find(c) != std::string_view::npos) out += '\\';
        out += c;
    }
    return out;
}

std::vector<MsplRule> expand_unions(const MsplRule& rule) {
    std::vector<MsplRule> out{rule};
    for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
        const auto& condition = rule.conditions[i];
        if (condition.op != MatchOperator::Union) continue;
        std::vector<MsplRule> next;
        for (const auto& partial : out) {
            for (const auto& member : condition.values) {
                MsplRule concrete = partial;
                concrete.conditions[i].op = MatchOperator::ExactMatch;
                concrete.conditions[i].values = {member};
                next.push_back(std::move(concrete));
            }
        }
        out = std::move(next);
    }
    return out;
}

std::vector<LowLevelRule> translate_policy(const MsplPolicy& policy, const RendererRegistry& registry) {
    const auto* entry = registry.find(policy.nsf_name);
    if (entry == nullptr) throw Error(Errc::UnknownControl, "no renderer for control '" + policy.nsf_name + "'");
    std::vector<LowLevelRule> out;
    std::size_t rule_number = 0;
    for (const auto& rule : policy.rules) {
        for (const auto& concrete : expand_unions(rule)) out.push_back(entry->render(concrete, ++rule_number));
    }
    return out;
}

std::string render_rules_file(const std::vector<LowLevelRule>& rules) {
    std::string out;
    for (const auto& rule : rules) out += rule.text + "\n";
    return out;
}

std::string rules_file_name(std::string_view device) { return std::string(device) + ".rules"; }

}  // namespace polref
