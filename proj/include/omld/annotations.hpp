#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "omld/cd.hpp"
#include "omld/decimal.hpp"
#include "omld/om.hpp"
#include "omld/rdf.hpp"

namespace omld::ann {

/// The statistical-data and derivation terms, resolved from a prefix table
/// (`rdf:`, `scv:`, `sl:`).
struct Vocabulary {
    rdf::Iri value;           // rdf:value
    rdf::Iri type;            // rdf:type
    rdf::Iri dimension;       // scv:dimension
    rdf::Iri dataset;         // scv:dataset
    rdf::Iri computed_from;   // sl:computedFrom
    rdf::Iri function;        // sl:function
    rdf::Iri arguments;       // sl:arguments
    rdf::Iri arg_position;    // sl:argPosition
    rdf::Iri arg_value;       // sl:argValue

    static Vocabulary from_prefixes(const std::map<std::string, std::string>& prefixes);
};

struct DataPoint {
    rdf::Iri id;
    std::vector<rdf::Iri> dimensions;  // sorted
    std::optional<Decimal> value;
    std::optional<rdf::Iri> dataset;
};

struct Argument {
    int position = 0;
    /// A data point reference, or a constant given inline as a literal.
    std::variant<rdf::Iri, Decimal> source;
    friend bool operator==(const Argument&, const Argument&) = default;
};

struct Derivation {
    rdf::Iri point;
    rdf::Iri function;
    std::vector<Argument> args;  // ordered by position, positions exactly 1..n
    friend bool operator==(const Derivation&, const Derivation&) = default;
};

class AnnotationError : public Error {
public:
    AnnotationError(std::string what, rdf::Iri subject) : Error(std::move(what)), subject_(std::move(subject)) {}
    const rdf::Iri& subject() const { return subject_; }

private:
    rdf::Iri subject_;
};

class BadValueLiteral : public AnnotationError {
public:
    explicit BadValueLiteral(const rdf::Iri& point);
};

class MissingFunction : public AnnotationError {
public:
    explicit MissingFunction(const rdf::Iri& point);
};

class BadArgPositions : public AnnotationError {
public:
    BadArgPositions(const rdf::Iri& point, const std::string& detail);
};

class MalformedArgument : public AnnotationError {
public:
    MalformedArgument(const rdf::Iri& point, const std::string& detail);
};

class UnresolvedArgument : public AnnotationError {
public:
    explicit UnresolvedArgument(const rdf::Iri& source);
};

class CyclicDerivation : public Error {
public:
    explicit CyclicDerivation(std::vector<rdf::Iri> chain);
    const std::vector<rdf::Iri>& chain() const { return chain_; }

private:
    std::vector<rdf::Iri> chain_;
};

class DerivationTooDeep : public Error {
public:
    DerivationTooDeep(std::vector<rdf::Iri> chain, int limit);
};

class NotAnApplication : public Error {
public:
    NotAnApplication() : Error("object is not an application of a symbol") {}
};

class UntraceableArgument : public Error {
public:
    explicit UntraceableArgument(std::size_t position);
};

/// One point per subject with at least one dimension, sorted by IRI.
std::vector<DataPoint> extract_data_points(const rdf::Graph& g, const Vocabulary& v);

/// One derivation per annotated point, sorted by point IRI. When a point has
/// several `computedFrom` nodes the first in blank-node order wins and the
/// others are reported through `warn`.
std::vector<Derivation> extract_derivations(const rdf::Graph& g, const Vocabulary& v,
                                            const cd::WarningSink& warn = {});

/// Data points and derivations of one graph, indexed by IRI. Subjects that
/// carry a numeric `rdf:value` without dimensions are indexed as well.
class Dataset {
public:
    Dataset(const rdf::Graph& g, const Vocabulary& v, const cd::WarningSink& warn = {});

    const DataPoint* point(const rdf::Iri& id) const;
    const Derivation* derivation(const rdf::Iri& id) const;
    const std::map<rdf::Iri, DataPoint>& points() const { return points_; }
    const std::map<rdf::Iri, Derivation>& derivations() const { return derivations_; }

    void set_value(const rdf::Iri& id, Decimal value);
    void clear_value(const rdf::Iri& id);

private:
    std::map<rdf::Iri, DataPoint> points_;
    std::map<rdf::Iri, Derivation> derivations_;
};

inline constexpr int kDefaultMaxDepth = 32;

/// Translates a derivation into `f(arg1, ..., argn)`. Arguments with a stored
/// value become numbers; derived arguments without one are translated
/// recursively, up to `max_depth` levels.
om::Object derivation_to_om(const Derivation& d, const Dataset& data, int max_depth = kDefaultMaxDepth);

/// Number object for an exact decimal: OMI when integral, OMF otherwise.
om::Object number(const Decimal& d);

using SourceLookup = std::function<std::optional<rdf::Iri>(std::size_t position, const om::Object& arg)>;

/// Emits the `computedFrom` structure for `obj` about `point`. Arguments the
/// lookup maps to a data point are written as references, plain numbers as
/// literal constants.
rdf::Graph om_to_derivation(const rdf::Iri& point, const om::Object& obj, const SourceLookup& source_of,
                            const Vocabulary& v);

}  // namespace omld::ann
