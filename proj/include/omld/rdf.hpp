#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "omld/error.hpp"

namespace omld::rdf {

inline constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema#";

/// An absolute IRI. Construction checks for a scheme; the fragment is kept verbatim.
class Iri {
public:
    Iri() = default;
    explicit Iri(std::string value);

    const std::string& str() const { return value_; }
    bool has_fragment() const { return value_.find('#') != std::string::npos; }
    /// The IRI with any `#fragment` removed.
    Iri without_fragment() const;

    friend auto operator<=>(const Iri&, const Iri&) = default;

private:
    std::string value_;
};

/// True for strings of the form `scheme:...` with an RFC 3986 scheme.
bool has_scheme(std::string_view s);

struct Literal {
    std::string lexical;
    std::optional<Iri> datatype;
    std::string language;

    friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct BlankNode {
    std::string label;
    friend auto operator<=>(const BlankNode&, const BlankNode&) = default;
};

using Term = std::variant<Iri, Literal, BlankNode>;

inline bool is_iri(const Term& t) { return std::holds_alternative<Iri>(t); }
inline bool is_literal(const Term& t) { return std::holds_alternative<Literal>(t); }
inline bool is_blank(const Term& t) { return std::holds_alternative<BlankNode>(t); }

Iri xsd(std::string_view local);
Literal typed_literal(std::string lexical, std::string_view xsd_local);

/// N-Triples rendering of a term; also the sort key used by Graph.
std::string to_ntriples(const Term& t);

struct Triple {
    Term subject;
    Iri predicate;
    Term object;

    friend bool operator==(const Triple&, const Triple&) = default;
};

std::string to_ntriples(const Triple& t);

/// Set of triples plus the prefix table they were read with. Triples are
/// kept sorted by their N-Triples rendering and indexed by each position.
class Graph {
public:
    /// Returns false when the triple was already present.
    bool insert(Triple t);
    bool erase(const Triple& t);

    /// Triples matching every bound position, sorted by term serialization.
    std::vector<Triple> match(const std::optional<Term>& s, const std::optional<Iri>& p,
                              const std::optional<Term>& o) const;

    /// Convenience: the single object of (s, p, ?), or nullopt when absent.
    std::optional<Term> object(const Term& s, const Iri& p) const;

    std::vector<Triple> triples() const;
    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }
    bool contains(const Triple& t) const { return triples_.count(to_ntriples(t)) != 0; }

    /// Mints `_:bN`, skipping labels already in use.
    BlankNode fresh_blank();

    /// Inserts all triples of `other`, renaming its blank nodes apart.
    void merge(const Graph& other);

    void set_prefix(std::string prefix, std::string iri) { prefixes_[std::move(prefix)] = std::move(iri); }
    const std::map<std::string, std::string>& prefixes() const { return prefixes_; }

private:
    using Key = std::string;
    std::map<Key, Triple> triples_;
    std::unordered_map<std::string, std::set<Key>> by_subject_;
    std::unordered_map<std::string, std::set<Key>> by_predicate_;
    std::unordered_map<std::string, std::set<Key>> by_object_;
    std::map<std::string, std::string> prefixes_;
    std::size_t blank_counter_ = 0;
    std::set<std::string> blank_labels_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, std::string expected);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string expected_;
};

class UnknownPrefix : public Error {
public:
    explicit UnknownPrefix(std::string prefix);
    const std::string& prefix() const { return prefix_; }

private:
    std::string prefix_;
};

/// Parses the supported Turtle subset: `@prefix`/`PREFIX`, `@base` at the top
/// of the document, IRIs, prefixed names, `a`, predicate-object lists,
/// `[...]` and `_:x` blank nodes, short strings, numbers, booleans, comments.
Graph parse_turtle(std::string_view text, const Iri& base);

/// Deterministic Turtle: sorted prefixes, subjects in term order, blank
/// nodes written as `_:bN`.
std::string serialize_turtle(const Graph& g);

}  // namespace omld::rdf
