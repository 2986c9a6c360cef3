#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "omld/error.hpp"

namespace omld::xml {

class XmlError : public Error {
public:
    using Error::Error;
};

/// Minimal element tree: text is the concatenation of the element's own
/// character data, children keep document order. Namespace prefixes are
/// stripped from element names.
struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string text;
    std::vector<Element> children;

    std::optional<std::string> attribute(std::string_view key) const;
    const Element* child(std::string_view name) const;
    std::vector<const Element*> children_named(std::string_view name) const;
};

/// Parses a document and returns its root element.
Element parse(std::string_view text);

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

}  // namespace omld::xml
