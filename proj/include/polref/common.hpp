#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace polref {

// Every failure the toolkit can report. The CLI maps each one to its own
// exit code (see exit_code()).
enum class Errc {
    SyntaxError,
    ValidationError,
    UnknownTemplate,
    UnknownSlot,
    DuplicateSlot,
    UnknownEndpoint,
    UnsupportedAction,
    NoDerivableRequirement,
    NothingToEnforce,
    Unenforceable,
    CorruptKnowledgeBase,
    InconsistentNsf,
    NormalizationError,
    UnknownControl,
    UnsupportedCapability,
    PersistError,
    IoError,
    ConfigError,
};

std::string_view errc_name(Errc code) noexcept;

/// Process exit status used by the CLI for a given error.
int exit_code(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// An IPv4 address held as a host-order 32-bit integer so that ranges compare numerically.
class Ipv4Address {
public:
    constexpr Ipv4Address() = default;
    constexpr explicit Ipv4Address(std::uint32_t value) : value_(value) {}

    /// Strict dotted-quad: four decimal octets 0..255, no leading '+', no empty octets.
    static std::optional<Ipv4Address> parse(std::string_view text);

    constexpr std::uint32_t value() const { return value_; }
    std::string to_string() const;

    constexpr auto operator<=>(const Ipv4Address&) const = default;

private:
    std::uint32_t value_ = 0;
};

/// At least two dot-separated labels, alphabetic TLD, no all-digit label.
bool is_valid_fqdn(std::string_view name);

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace polref
