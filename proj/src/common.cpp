#include "polref/common.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace polref {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::SyntaxError:            return "SyntaxError";
        case Errc::ValidationError:        return "ValidationError";
        case Errc::UnknownTemplate:        return "UnknownTemplate";
        case Errc::UnknownSlot:            return "UnknownSlot";
        case Errc::DuplicateSlot:          return "DuplicateSlot";
        case Errc::UnknownEndpoint:        return "UnknownEndpoint";
        case Errc::UnsupportedAction:      return "UnsupportedAction";
        case Errc::NoDerivableRequirement: return "NoDerivableRequirement";
        case Errc::NothingToEnforce:       return "NothingToEnforce";
        case Errc::Unenforceable:          return "Unenforceable";
        case Errc::CorruptKnowledgeBase:   return "CorruptKnowledgeBase";
        case Errc::InconsistentNsf:        return "InconsistentNsf";
        case Errc::NormalizationError:     return "NormalizationError";
        case Errc::UnknownControl:         return "UnknownControl";
        case Errc::UnsupportedCapability:  return "UnsupportedCapability";
        case Errc::PersistError:           return "PersistError";
        case Errc::IoError:                return "IoError";
        case Errc::ConfigError:            return "ConfigError";
    }
    return "Unknown";
}

int exit_code(Errc code) noexcept {
    // 0 = success, 1 = unexpected internal failure, 2 = usage, 3 = verify found a bypass.
    return 10 + static_cast<int>(code);
}

std::optional<Ipv4Address> Ipv4Address::parse(std::string_view text) {
    std::uint32_t value = 0;
    std::size_t pos = 0;
    for (int octet = 0; octet < 4; ++octet) {
        if (octet > 0) {
            if (pos >= text.size() || text[pos] != '.') return std::nullopt;
            ++pos;
        }
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        std::size_t len = pos - start;
        if (len == 0 || len > 3) return std::nullopt;
        unsigned part = 0;
        std::from_chars(text.data() + start, text.data() + pos, part);
        if (part > 255) return std::nullopt;
        value = (value << 8) | part;
    }
    if (pos != text.size()) return std::nullopt;
    return Ipv4Address(value);
}

std::string Ipv4Address::to_string() const {
    return std::to_string((value_ >> 24) & 0xff) + '.' + std::to_string((value_ >> 16) & 0xff) +
           '.' + std::to_string((value_ >> 8) & 0xff) + '.' + std::to_string(value_ & 0xff);
}

bool is_valid_fqdn(std::string_view name) {
    if (name.empty() || name.size() > 253) return false;
    std::size_t labels = 0;
    std::string_view last;
    std::size_t start = 0;
    while (start <= name.size()) {
        std::size_t dot = name.find('.', start);
        std::string_view label = name.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
        if (label.empty() || label.size() > 63) return false;
        if (label.front() == '-' || label.back() == '-') return false;
        bool all_digits = true;
        for (char c : label) {
            auto uc = static_cast<unsigned char>(c);
            if (!std::isalnum(uc) && c != '-') return false;
            if (!std::isdigit(uc)) all_digits = false;
        }
        if (all_digits) return false;
        ++labels;
        last = label;
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    if (labels < 2) return false;
    return std::all_of(last.begin(), last.end(),
                       [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; });
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view text) {
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
    return text;
}

}  // namespace polref
