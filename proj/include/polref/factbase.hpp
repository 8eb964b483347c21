#pragma once

#include "polref/common.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// CLIPS-style templates and facts. Only the STRING slot type exists.
namespace polref {

enum class SlotType { String };

struct SlotDef {
    std::string name;
    SlotType type = SlotType::String;

    bool operator==(const SlotDef&) const = default;
};

struct Template {
    std::string name;
    std::vector<SlotDef> slots;

    bool has_slot(std::string_view slot) const;
    bool operator==(const Template&) const = default;
};

struct Fact {
    std::string template_name;
    std::map<std::string, std::string> bindings;

    bool operator==(const Fact&) const = default;
};

// A value type: every operation returns a new Knowledge and leaves its input untouched.
class Knowledge {
public:
    const std::map<std::string, Template>& templates() const { return templates_; }
    const std::vector<Fact>& facts() const { return facts_; }

    const Template* find_template(std::string_view name) const;

    /// Registers a new template. Throws ValidationError if the name is taken or slots repeat.
    Knowledge with_template(Template tmpl) const;

    /// Asserts a fact after validating it. An identical fact already present is not duplicated.
    /// Throws UnknownTemplate, UnknownSlot or ValidationError (no bindings).
    Knowledge with_fact(Fact fact) const;

    bool operator==(const Knowledge&) const = default;

private:
    std::map<std::string, Template> templates_;
    std::vector<Fact> facts_;
};

/// Parses the JSON envelope `{"templates": [...], "facts": [...]}` of s-expression strings.
/// A "rules" member is accepted and ignored with a warning.
Knowledge parse_knowledge(std::string_view document);

/// Envelope JSON, templates in name order, fact bindings in template slot order.
std::string serialize_knowledge(const Knowledge& knowledge);

/// Appends `new_slot` to `template_name`. Throws UnknownTemplate or DuplicateSlot.
Knowledge extend_template(const Knowledge& knowledge, std::string_view template_name, SlotDef new_slot);

/// Facts of one template in insertion order, optionally only those binding `slot_filter`.
std::vector<Fact> query_facts(const Knowledge& knowledge, std::string_view template_name,
                              std::optional<std::string_view> slot_filter = std::nullopt);

// s-expression forms used inside the envelope
Template parse_template_sexpr(std::string_view text);
Fact parse_fact_sexpr(std::string_view text);
std::string to_sexpr(const Template& tmpl);
std::string to_sexpr(const Fact& fact, const Template& tmpl);

}  // namespace polref
