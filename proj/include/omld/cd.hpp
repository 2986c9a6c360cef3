#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "omld/om.hpp"
#include "omld/rdf.hpp"

namespace omld::cd {

struct SymbolDefinition {
    std::string name;
    std::string description;
    std::vector<std::string> cmps;  // verbatim, never interpreted
    std::vector<om::Object> fmps;

    friend bool operator==(const SymbolDefinition&, const SymbolDefinition&) = default;
};

struct ContentDictionary {
    std::string cdbase = std::string(om::kDefaultCdBase);
    std::string cdname;
    std::string description;
    std::vector<SymbolDefinition> definitions;
    std::optional<rdf::Iri> source_url;

    const SymbolDefinition* find(std::string_view name) const;
    om::Symbol symbol(std::string_view name) const { return {cdbase, cdname, std::string(name)}; }

    /// Structural equality of content; the source URL is not compared.
    friend bool operator==(const ContentDictionary& a, const ContentDictionary& b) {
        return a.cdbase == b.cdbase && a.cdname == b.cdname && a.description == b.description &&
               a.definitions == b.definitions;
    }
};

class MissingElement : public Error {
public:
    explicit MissingElement(std::string path);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class DuplicateSymbol : public Error {
public:
    explicit DuplicateSymbol(std::string name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// Reads the `.ocd` format. Unrecognized children of `CD` and
/// `CDDefinition` (CDVersion, Role, Example, ...) are skipped.
ContentDictionary parse_cd_xml(std::string_view text, std::optional<rdf::Iri> source_url = std::nullopt);

/// Writes a CD document that parse_cd_xml reads back to an equal value.
std::string serialize_cd_xml(const ContentDictionary& cd);

/// A CD envelope holding only the named definition, used for slash URIs.
std::string serialize_single_definition(const ContentDictionary& cd, const SymbolDefinition& def);

/// `eq(f(x1..xn), body)` or `eq(c, body)` read as a definition of f / c.
struct DefinitionalFmp {
    om::Symbol symbol;
    std::vector<om::Variable> params;
    om::Object body;

    std::size_t arity() const { return params.size(); }
};

struct NotDefinitional {};
struct NoSuchSymbol {};

using DefinitionLookup = std::variant<DefinitionalFmp, NotDefinitional, NoSuchSymbol>;

using WarningSink = std::function<void(const std::string&)>;

/// Returns the first definitional FMP of `name` in document order. Later
/// definitional FMPs are reported through `warn` and otherwise ignored.
DefinitionLookup find_definition(const ContentDictionary& cd, std::string_view name, const WarningSink& warn = {});

struct TypedLink {
    rdf::Iri subject;
    rdf::Iri predicate;
    rdf::Iri object;
    friend auto operator<=>(const TypedLink&, const TypedLink&) = default;
};

inline const std::string kSeeAlso = "http://www.w3.org/2000/01/rdf-schema#seeAlso";

/// FMPs of shape `pred(subject, object)` with `pred` one of `predicates`
/// (compared by hash symbol URI), in document order.
std::vector<TypedLink> extract_links(const ContentDictionary& cd,
                                     const std::set<std::string>& predicates = {kSeeAlso});

}  // namespace omld::cd
