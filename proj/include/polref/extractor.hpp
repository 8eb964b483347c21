#pragma once

#include "polref/factbase.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace polref {

enum class IndicatorKind { SourceIpAddress, DestinationIpAddress, Url };

/// Slot name used for the kind inside the `entity` template, e.g. "destination-ip-address".
std::string_view slot_name(IndicatorKind kind);

struct Indicator {
    IndicatorKind kind;
    std::string value;
    std::size_t begin = 0;  // character span of the first occurrence, [begin, end)
    std::size_t end = 0;

    bool operator==(const Indicator&) const = default;
};

// Replaceable extraction backend. Implementations must be deterministic and return
// distinct (kind, value) indicators in order of first occurrence.
class IndicatorExtractor {
public:
    virtual ~IndicatorExtractor() = default;
    virtual std::vector<Indicator> extract(std::string_view text) const = 0;
};

// Regex-driven reference extractor for IPv4 addresses and domain names.
//
// An IPv4 address is a source-ip-address when one of the source cues ("from the address",
// "sends requests from", "originating from") occurs within the 8 whitespace-separated tokens
// that precede it; otherwise it is a destination-ip-address. Domains are matched
// case-insensitively and lowercased; labels made only of digits never form a domain, so
// dotted quads are not re-matched.
class PatternExtractor final : public IndicatorExtractor {
public:
    std::vector<Indicator> extract(std::string_view text) const override;
};

std::vector<Indicator> extract_indicators(std::string_view text);

inline constexpr std::string_view kEntityTemplate = "entity";

/// Asserts one `entity` fact per indicator. Missing slots are appended to the template first
/// (created if absent) unless `allow_extension` is false, in which case the assertion fails
/// with UnknownSlot/UnknownTemplate.
Knowledge indicators_to_knowledge(const std::vector<Indicator>& indicators, const Knowledge& base,
                                  bool allow_extension = true);

}  // namespace polref
