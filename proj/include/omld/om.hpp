#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "omld/decimal.hpp"
#include "omld/error.hpp"
#include "omld/rdf.hpp"

namespace omld::xml {
struct Element;
}

namespace omld::om {

inline constexpr std::string_view kDefaultCdBase = "http://www.openmath.org/cd";
inline constexpr std::string_view kNamespace = "http://www.openmath.org/OpenMath";
/// Media type used for both OpenMath objects and Content Dictionaries.
inline constexpr std::string_view kMimeType = "application/openmath+xml";

struct Node;

/// Immutable, shareable handle to an OpenMath object tree.
class Object {
public:
    explicit Object(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    const Node& node() const { return *node_; }
    template <class T>
    const T* as() const;
    template <class T>
    bool is() const {
        return as<T>() != nullptr;
    }

    friend bool operator==(const Object& a, const Object& b);

private:
    std::shared_ptr<const Node> node_;
};

struct Symbol {
    std::string cdbase;
    std::string cd;
    std::string name;
    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

struct Integer {
    BigInt value;
    friend bool operator==(const Integer&, const Integer&) = default;
};

struct Float {
    double value;
    friend bool operator==(const Float&, const Float&) = default;
};

struct Variable {
    std::string name;
    friend auto operator<=>(const Variable&, const Variable&) = default;
};

struct String {
    std::string value;
    friend bool operator==(const String&, const String&) = default;
};

struct Application {
    Object head;
    std::vector<Object> args;
    friend bool operator==(const Application&, const Application&) = default;
};

struct Binding {
    Object binder;
    std::vector<Variable> vars;
    Object body;
    friend bool operator==(const Binding&, const Binding&) = default;
};

struct Node : std::variant<Symbol, Integer, Float, Variable, Application, Binding, String> {
    using variant::variant;
};

template <class T>
const T* Object::as() const {
    return std::get_if<T>(static_cast<const Node::variant*>(node_.get()));
}

inline bool operator==(const Object& a, const Object& b) {
    if (a.node_ == b.node_) return true;
    return static_cast<const Node::variant&>(*a.node_) == static_cast<const Node::variant&>(*b.node_);
}

class EncodingError : public Error {
public:
    EncodingError(std::string element, std::string reason);
    const std::string& element() const { return element_; }
    const std::string& reason() const { return reason_; }

private:
    std::string element_;
    std::string reason_;
};

/// Invariant violations when building objects by hand.
class InvalidObject : public Error {
public:
    using Error::Error;
};

// Builders. They enforce the object invariants and normalize an empty
// cdbase to the default one.
Object symbol(std::string cdbase, std::string cd, std::string name);
Object symbol(const Symbol& s);
Object integer(BigInt v);
Object floating(double v);
Object variable(std::string name);
Object string(std::string v);
Object apply(Object head, std::vector<Object> args);
Object bind(Object binder, std::vector<Variable> vars, Object body);

/// Shorthand for symbols in the default cdbase, e.g. `om::sym("arith1", "plus")`.
Object sym(std::string cd, std::string name);

bool is_ncname(std::string_view s);

/// Free variables of `obj`, honouring OMBIND scopes.
std::set<std::string> free_variables(const Object& obj);

/// Parses `<OMOBJ>...</OMOBJ>` (or a bare object element).
Object parse_om_xml(std::string_view text);
/// Converts an already-parsed OpenMath element (OMOBJ or any object element).
Object from_element(const xml::Element& e);

/// `<OMOBJ xmlns=...>` wrapper around the object. With `with_namespace`
/// false the xmlns attribute is left out.
std::string serialize_om_xml(const Object& obj, bool with_namespace = false);
/// The bare object element without the OMOBJ wrapper.
std::string serialize_element(const Object& obj);

/// Short human-readable rendering, e.g. `arith1.divide(693, 380)`.
std::string to_text(const Object& obj);

// ---------------------------------------------------------------------------
// Symbol URIs

enum class UriScheme { Hash, Slash };

struct SymbolUri {
    UriScheme scheme = UriScheme::Hash;
    std::string cdbase;
    std::string cd;
    std::string name;
    friend auto operator<=>(const SymbolUri&, const SymbolUri&) = default;
};

class MalformedSymbolUri : public Error {
public:
    explicit MalformedSymbolUri(const std::string& iri);
};

rdf::Iri render_symbol_uri(const SymbolUri& u);
SymbolUri parse_symbol_uri(const rdf::Iri& iri);

/// Hash URI of an OMS, the OpenMath standard form `cdbase/cd#name`.
rdf::Iri symbol_iri(const Symbol& s);
/// OMS named by a symbol URI (either scheme).
Symbol symbol_from_iri(const rdf::Iri& iri);

}  // namespace omld::om
