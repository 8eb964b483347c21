#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace polref {

enum class HsplAction { DenyAccess };

inline constexpr std::string_view kDenyAccessText = "is not authorized to access";

std::string_view to_string(HsplAction action);

struct HsplPolicy {
    std::string id;
    std::string subject;
    HsplAction action = HsplAction::DenyAccess;
    std::string object;

    bool operator==(const HsplPolicy&) const = default;
};

/// One policy per <hspl> element in document order. The elements may sit at top level or
/// inside a single wrapper element. Throws SyntaxError, UnsupportedAction or ValidationError
/// (missing field, duplicate id, subject equal to object).
std::vector<HsplPolicy> parse_hspl(std::string_view document);

}  // namespace polref
