#include "polref/hspl.hpp"

#include "polref/common.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <set>
#include <sstream>

namespace polref {
namespace {

namespace pt = boost::property_tree;

std::string child_text(const pt::ptree& element, const std::string& name, const std::string& id) {
    auto child = element.get_child_optional(name);
    if (!child) throw Error(Errc::ValidationError, "hspl '" + id + "' has no <" + name + ">");
    auto text = std::string(trim(child->data()));
    if (text.empty()) throw Error(Errc::ValidationError, "hspl '" + id + "' has empty <" + name + ">");
    return text;
}

HsplPolicy parse_element(const pt::ptree& element) {
    HsplPolicy policy;
    policy.id = std::string(trim(element.get<std::string>("<xmlattr>.id", "")));
    if (policy.id.empty()) throw Error(Errc::ValidationError, "hspl element without id");
    policy.subject = child_text(element, "subject", policy.id);
    policy.object = child_text(element, "object", policy.id);
    auto action = child_text(element, "action", policy.id);
    if (action != kDenyAccessText)
        throw Error(Errc::UnsupportedAction, "hspl '" + policy.id + "': unsupported action '" + action + "'");
    if (policy.subject == policy.object)
        throw Error(Errc::ValidationError, "hspl '" + policy.id + "': subject equals object");
    return policy;
}

}  // namespace

std::string_view to_string(HsplAction) { return kDenyAccessText; }

std::vector<HsplPolicy> parse_hspl(std::string_view document) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(document)};
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw Error(Errc::SyntaxError, "hspl line " + std::to_string(e.line()) + ": " + e.message());
    }

    std::vector<const pt::ptree*> elements;
    for (const auto& [name, child] : tree) {
        if (name == "hspl") {
            elements.push_back(&child);
        } else if (name != "<xmlcomment>") {
            for (const auto& [inner_name, inner] : child)
                if (inner_name == "hspl") elements.push_back(&inner);
        }
    }

    std::vector<HsplPolicy> policies;
    std::set<std::string> ids;
    for (const auto* element : elements) {
        auto policy = parse_element(*element);
        if (!ids.insert(policy.id).second) throw Error(Errc::ValidationError, "duplicate hspl id '" + policy.id + "'");
        policies.push_back(std::move(policy));
    }
    return policies;
}

}  // namespace polref
