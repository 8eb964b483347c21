#include "polref/factbase.hpp"

#include "polref/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace polref {
namespace {

[[noreturn]] void syntax(const std::string& message) { throw Error(Errc::SyntaxError, message); }

// Minimal s-expression reader: lists, bare symbols and double-quoted strings.
struct SExpr {
    enum class Kind { Symbol, String, List } kind = Kind::List;
    std::string text;
    std::vector<SExpr> items;
};

class SExprReader {
public:
    explicit SExprReader(std::string_view text) : text_(text) {}

    SExpr read_single() {
        skip_space();
        SExpr expr = read();
        skip_space();
        if (pos_ != text_.size()) fail("trailing input");
        return expr;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        syntax(what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    SExpr read() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            SExpr list;
            for (;;) {
                skip_space();
                if (pos_ >= text_.size()) fail("unbalanced parentheses");
                if (text_[pos_] == ')') {
                    ++pos_;
                    return list;
                }
                list.items.push_back(read());
            }
        }
        if (c == ')') fail("unexpected ')'");
        if (c == '"') return read_string();
        return read_symbol();
    }

    SExpr read_string() {
        ++pos_;
        SExpr out{SExpr::Kind::String, {}, {}};
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') {
                ++pos_;
                if (pos_ >= text_.size()) break;
            }
            out.text += text_[pos_++];
        }
        if (pos_ >= text_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    SExpr read_symbol() {
        SExpr out{SExpr::Kind::Symbol, {}, {}};
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '"') break;
            out.text += c;
            ++pos_;
        }
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

bool is_symbol(const SExpr& e, std::string_view text = {}) {
    return e.kind == SExpr::Kind::Symbol && (text.empty() || e.text == text);
}

std::string quote(std::string_view value) {
    std::string out = "\"";
    for (char c : value) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

void validate_template(const Template& tmpl) {
    if (tmpl.name.empty()) throw Error(Errc::ValidationError, "template without name");
    for (std::size_t i = 0; i < tmpl.slots.size(); ++i) {
        if (tmpl.slots[i].name.empty()) throw Error(Errc::ValidationError, "empty slot name in " + tmpl.name);
        for (std::size_t j = 0; j < i; ++j) {
            if (tmpl.slots[j].name == tmpl.slots[i].name)
                throw Error(Errc::DuplicateSlot, "slot '" + tmpl.slots[i].name + "' repeated in " + tmpl.name);
        }
    }
}

}  // namespace

bool Template::has_slot(std::string_view slot) const {
    return std::any_of(slots.begin(), slots.end(), [&](const SlotDef& s) { return s.name == slot; });
}

const Template* Knowledge::find_template(std::string_view name) const {
    auto it = templates_.find(std::string(name));
    return it == templates_.end() ? nullptr : &it->second;
}

Knowledge Knowledge::with_template(Template tmpl) const {
    validate_template(tmpl);
    if (templates_.contains(tmpl.name))
        throw Error(Errc::ValidationError, "template '" + tmpl.name + "' already defined");
    Knowledge next = *this;
    auto name = tmpl.name;
    next.templates_.emplace(std::move(name), std::move(tmpl));
    return next;
}

Knowledge Knowledge::with_fact(Fact fact) const {
    const Template* tmpl = find_template(fact.template_name);
    if (tmpl == nullptr) throw Error(Errc::UnknownTemplate, "unknown template '" + fact.template_name + "'");
    if (fact.bindings.empty()) throw Error(Errc::ValidationError, "fact binds no slot");
    for (const auto& [slot, value] : fact.bindings) {
        if (!tmpl->has_slot(slot))
            throw Error(Errc::UnknownSlot, "template '" + tmpl->name + "' has no slot '" + slot + "'");
    }
    Knowledge next = *this;
    if (std::find(facts_.begin(), facts_.end(), fact) == facts_.end()) next.facts_.push_back(std::move(fact));
    return next;
}

Template parse_template_sexpr(std::string_view text) {
    SExpr expr = SExprReader(text).read_single();
    if (expr.kind != SExpr::Kind::List || expr.items.size() < 2 || !is_symbol(expr.items[0], "deftemplate") ||
        !is_symbol(expr.items[1]))
        syntax("expected (deftemplate NAME slot*) in '" + std::string(text) + "'");
    Template tmpl{expr.items[1].text, {}};
    for (std::size_t i = 2; i < expr.items.size(); ++i) {
        const SExpr& slot = expr.items[i];
        bool ok = slot.kind == SExpr::Kind::List && slot.items.size() == 3 && is_symbol(slot.items[0], "slot") &&
                  is_symbol(slot.items[1]) && slot.items[2].kind == SExpr::Kind::List &&
                  slot.items[2].items.size() == 2 && is_symbol(slot.items[2].items[0], "type") &&
                  is_symbol(slot.items[2].items[1], "STRING");
        if (!ok) syntax("expected (slot NAME (type STRING)) in template '" + tmpl.name + "'");
        tmpl.slots.push_back(SlotDef{slot.items[1].text, SlotType::String});
    }
    validate_template(tmpl);
    return tmpl;
}

Fact parse_fact_sexpr(std::string_view text) {
    SExpr expr = SExprReader(text).read_single();
    if (expr.kind != SExpr::Kind::List || expr.items.empty() || !is_symbol(expr.items[0]))
        syntax("expected (TEMPLATE binding*) in '" + std::string(text) + "'");
    Fact fact{expr.items[0].text, {}};
    for (std::size_t i = 1; i < expr.items.size(); ++i) {
        const SExpr& binding = expr.items[i];
        if (binding.kind != SExpr::Kind::List || binding.items.size() != 2 || !is_symbol(binding.items[0]) ||
            binding.items[1].kind != SExpr::Kind::String)
            syntax("expected (SLOT \"value\") in fact '" + std::string(text) + "'");
        if (!fact.bindings.emplace(binding.items[0].text, binding.items[1].text).second)
            throw Error(Errc::ValidationError, "slot '" + binding.items[0].text + "' bound twice");
    }
    return fact;
}

std::string to_sexpr(const Template& tmpl) {
    std::string out = "(deftemplate " + tmpl.name;
    for (const auto& slot : tmpl.slots) out += " (slot " + slot.name + " (type STRING))";
    return out + ")";
}

std::string to_sexpr(const Fact& fact, const Template& tmpl) {
    std::string out = "(" + fact.template_name;
    for (const auto& slot : tmpl.slots) {
        auto it = fact.bindings.find(slot.name);
        if (it != fact.bindings.end()) out += " (" + slot.name + " " + quote(it->second) + ")";
    }
    return out + ")";
}

Knowledge parse_knowledge(std::string_view document) {
    nlohmann::json envelope;
    try {
        envelope = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::SyntaxError, std::string("knowledge envelope: ") + e.what());
    }
    if (!envelope.is_object()) syntax("knowledge envelope must be a JSON object");

    auto strings = [&](const char* key) {
        std::vector<std::string> out;
        if (!envelope.contains(key)) return out;
        const auto& arr = envelope.at(key);
        if (!arr.is_array()) syntax(std::string("'") + key + "' must be an array");
        for (const auto& item : arr) {
            if (!item.is_string()) syntax(std::string("'") + key + "' entries must be strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    };

    for (const auto& [key, value] : envelope.items()) {
        if (key == "rules") {
            log::warn("factbase", "rules_ignored", {{"count", std::to_string(value.size())}});
        } else if (key != "templates" && key != "facts") {
            log::warn("factbase", "unknown_member_ignored", {{"member", key}});
        }
    }

    Knowledge knowledge;
    for (const auto& text : strings("templates")) knowledge = knowledge.with_template(parse_template_sexpr(text));
    for (const auto& text : strings("facts")) knowledge = knowledge.with_fact(parse_fact_sexpr(text));
    return knowledge;
}

std::string serialize_knowledge(const Knowledge& knowledge) {
    nlohmann::ordered_json envelope;
    envelope["templates"] = nlohmann::ordered_json::array();
    envelope["facts"] = nlohmann::ordered_json::array();
    for (const auto& [name, tmpl] : knowledge.templates()) envelope["templates"].push_back(to_sexpr(tmpl));
    for (const auto& fact : knowledge.facts())
        envelope["facts"].push_back(to_sexpr(fact, *knowledge.find_template(fact.template_name)));
    return envelope.dump(2) + "\n";
}

Knowledge extend_template(const Knowledge& knowledge, std::string_view template_name, SlotDef new_slot) {
    const Template* existing = knowledge.find_template(template_name);
    if (existing == nullptr) throw Error(Errc::UnknownTemplate, "unknown template '" + std::string(template_name) + "'");
    if (existing->has_slot(new_slot.name))
        throw Error(Errc::DuplicateSlot, "template '" + existing->name + "' already has slot '" + new_slot.name + "'");

    Template extended = *existing;
    extended.slots.push_back(std::move(new_slot));

    // Rebuild: same templates with the extended one swapped in, same facts in the same order.
    Knowledge next;
    for (const auto& [name, tmpl] : knowledge.templates())
        next = next.with_template(name == extended.name ? extended : tmpl);
    for (const auto& fact : knowledge.facts()) next = next.with_fact(fact);
    return next;
}

std::vector<Fact> query_facts(const Knowledge& knowledge, std::string_view template_name,
                              std::optional<std::string_view> slot_filter) {
    if (knowledge.find_template(template_name) == nullptr)
        throw Error(Errc::UnknownTemplate, "unknown template '" + std::string(template_name) + "'");
    std::vector<Fact> out;
    for (const auto& fact : knowledge.facts()) {
        if (fact.template_name != template_name) continue;
        if (slot_filter && !fact.bindings.contains(std::string(*slot_filter))) continue;
        out.push_back(fact);
    }
    return out;
}

}  // namespace polref
