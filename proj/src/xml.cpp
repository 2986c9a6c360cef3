#include "omld/xml.hpp"

#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace omld::xml {

namespace pt = boost::property_tree;

namespace {

std::string local_name(const std::string& qname) {
    auto colon = qname.find(':');
    return colon == std::string::npos ? qname : qname.substr(colon + 1);
}

Element convert(const std::string& name, const pt::ptree& node) {
    Element e;
    e.name = local_name(name);
    e.text = node.data();
    for (const auto& [key, child] : node) {
        if (key == "<xmlattr>") {
            for (const auto& [attr, value] : child) e.attributes.emplace_back(attr, value.data());
        } else if (key == "<xmlcomment>" || key == "<xmltext>") {
            continue;
        } else {
            e.children.push_back(convert(key, child));
        }
    }
    return e;
}

}  // namespace

std::optional<std::string> Element::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
        if (k == key) return v;
    return std::nullopt;
}

const Element* Element::child(std::string_view n) const {
    for (const auto& c : children)
        if (c.name == n) return &c;
    return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view n) const {
    std::vector<const Element*> out;
    for (const auto& c : children)
        if (c.name == n) out.push_back(&c);
    return out;
}

Element parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    pt::ptree tree;
    try {
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw XmlError("malformed XML at line " + std::to_string(e.line()) + ": " + e.message());
    }
    const pt::ptree* root = nullptr;
    std::string root_name;
    for (const auto& [key, child] : tree) {
        if (key == "<xmlcomment>" || key == "<xmlattr>") continue;
        if (root) throw XmlError("more than one root element");
        root = &child;
        root_name = key;
    }
    if (!root) throw XmlError("document has no root element");
    return convert(root_name, *root);
}

std::string escape_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_attribute(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace omld::xml
