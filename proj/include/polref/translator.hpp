#pragma once

#include "polref/capability.hpp"
#include "polref/converter.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace polref {

struct LowLevelRule {
    std::string control;
    std::string text;  // exact bytes, no trailing newline

    bool operator==(const LowLevelRule&) const = default;
};

// Renders one rule whose conditions carry no union operator. `rule_number` counts rendered
// rules within the policy file, starting at 1.
using Renderer = std::function<LowLevelRule(const MsplRule& rule, std::size_t rule_number)>;

class RendererRegistry {
public:
    struct Entry {
        std::set<CapabilityId> supported;
        Renderer render;
    };

    void add(std::string control, std::set<CapabilityId> supported, Renderer render);
    const Entry* find(std::string_view control) const;

    /// Every control in the catalog must have a renderer covering all of its declared
    /// capabilities. Throws ConfigError.
    void check_catalog(const Catalog& catalog) const;

private:
    std::map<std::string, Entry, std::less<>> entries_;
};

/// Renderers for IpTables and ModSecurity.
const RendererRegistry& default_registry();

/// `iptables -A FORWARD[ -m conntrack --ctstate S][ -s SRC][ -d DST] -j DROP`; ranges use
/// `-m iprange --src-range a-b` / `--dst-range a-b`. Throws UnsupportedCapability.
LowLevelRule render_iptables(const MsplRule& rule);

/// `SecRule REQUEST_HEADERS:Host "@rx ^HOST$" \` + newline + `  "deny, id:N"`.
/// Throws UnsupportedCapability.
LowLevelRule render_modsecurity(const MsplRule& rule, std::size_t rule_number);

/// Backslash-escapes `. \ + * ? ( ) [ ] { } | ^ $`.
std::string escape_regex(std::string_view text);

/// One concrete rule per combination of union members, in member order.
std::vector<MsplRule> expand_unions(const MsplRule& rule);

/// Throws UnknownControl or UnsupportedCapability.
std::vector<LowLevelRule> translate_policy(const MsplPolicy& policy,
                                           const RendererRegistry& registry = default_registry());

/// Rule blocks joined with LF, each block newline-terminated.
std::string render_rules_file(const std::vector<LowLevelRule>& rules);

/// "<device>.rules"
std::string rules_file_name(std::string_view device);

}  // namespace polref
