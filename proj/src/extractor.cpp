#include "polref/extractor.hpp"

#include "polref/log.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <utility>

namespace polref {
namespace {

constexpr std::array<std::string_view, 3> kSourceCues = {
    "from the address",
    "sends requests from",
    "originating from",
};
constexpr std::size_t kCueWindowTokens = 8;

bool is_run_char(char c) {
    auto uc = static_cast<unsigned char>(c);
    return std::isalnum(uc) || c == '.' || c == '-' || c == '_';
}

bool has_source_cue(std::string_view preceding) {
    std::vector<std::string_view> tokens;
    std::size_t pos = preceding.size();
    while (pos > 0 && tokens.size() < kCueWindowTokens) {
        while (pos > 0 && std::isspace(static_cast<unsigned char>(preceding[pos - 1]))) --pos;
        std::size_t end = pos;
        while (pos > 0 && !std::isspace(static_cast<unsigned char>(preceding[pos - 1]))) --pos;
        if (end > pos) tokens.push_back(preceding.substr(pos, end - pos));
    }
    std::string window;
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        if (!window.empty()) window += ' ';
        window += to_lower(*it);
    }
    return std::any_of(kSourceCues.begin(), kSourceCues.end(),
                       [&](std::string_view cue) { return window.find(cue) != std::string::npos; });
}

bool plausible_domain(std::string_view candidate) {
    if (!is_valid_fqdn(candidate)) return false;
    auto tld = candidate.substr(candidate.rfind('.') + 1);
    return tld.size() >= 2;
}

}  // namespace

std::string_view slot_name(IndicatorKind kind) {
    switch (kind) {
        case IndicatorKind::SourceIpAddress:      return "source-ip-address";
        case IndicatorKind::DestinationIpAddress: return "destination-ip-address";
        case IndicatorKind::Url:                  return "url";
    }
    return "unknown";
}

std::vector<Indicator> PatternExtractor::extract(std::string_view text) const {
    std::vector<Indicator> out;
    std::set<std::pair<IndicatorKind, std::string>> seen;

    std::size_t pos = 0;
    while (pos < text.size()) {
        if (!is_run_char(text[pos])) {
            ++pos;
            continue;
        }
        std::size_t begin = pos;
        while (pos < text.size() && is_run_char(text[pos])) ++pos;
        std::size_t end = pos;
        // Sentence punctuation and hyphenation around a token are not part of it.
        while (begin < end && (text[begin] == '.' || text[begin] == '-')) ++begin;
        while (end > begin && (text[end - 1] == '.' || text[end - 1] == '-')) --end;
        if (begin == end) continue;

        std::string_view token = text.substr(begin, end - begin);
        std::optional<Indicator> found;
        if (auto ip = Ipv4Address::parse(token)) {
            auto kind = has_source_cue(text.substr(0, begin)) ? IndicatorKind::SourceIpAddress
                                                              : IndicatorKind::DestinationIpAddress;
            found = Indicator{kind, ip->to_string(), begin, end};
        } else if (plausible_domain(token)) {
            found = Indicator{IndicatorKind::Url, to_lower(token), begin, end};
        }
        if (found && seen.emplace(found->kind, found->value).second) out.push_back(std::move(*found));
    }
    return out;
}

std::vector<Indicator> extract_indicators(std::string_view text) {
    return PatternExtractor{}.extract(text);
}

Knowledge indicators_to_knowledge(const std::vector<Indicator>& indicators, const Knowledge& base,
                                  bool allow_extension) {
    Knowledge knowledge = base;
    const std::string entity(kEntityTemplate);
    for (const auto& indicator : indicators) {
        const std::string slot(slot_name(indicator.kind));
        if (allow_extension) {
            const Template* tmpl = knowledge.find_template(entity);
            if (tmpl == nullptr) {
                knowledge = knowledge.with_template(Template{entity, {SlotDef{slot, SlotType::String}}});
                log::event("extractor", "template_created", {{"template", entity}, {"slot", slot}});
            } else if (!tmpl->has_slot(slot)) {
                knowledge = extend_template(knowledge, entity, SlotDef{slot, SlotType::String});
                log::event("extractor", "template_extended", {{"template", entity}, {"slot", slot}});
            }
        }
        knowledge = knowledge.with_fact(Fact{entity, {{slot, indicator.value}}});
        log::event("extractor", "fact_asserted", {{"slot", slot}, {"value", indicator.value}});
    }
    return knowledge;
}

}  // namespace polref
