#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "omld/annotations.hpp"
#include "omld/cd.hpp"
#include "omld/om.hpp"
#include "omld/rdf.hpp"

namespace omld::rewrite {

/// Content Dictionaries keyed by (cdbase, cdname). Misses go to the fetch
/// hook; whatever it returns is kept for the rest of the run. A stored CD is
/// never replaced. Safe for concurrent use.
class CdStore {
public:
    using FetchHook =
        std::function<std::optional<cd::ContentDictionary>(const std::string& cdbase, const std::string& cdname)>;

    explicit CdStore(FetchHook hook = {}) : hook_(std::move(hook)) {}

    /// Returns false (and keeps the old one) if the key is already taken.
    bool add(cd::ContentDictionary cd);

    /// Cached CD, fetching through the hook on a miss. nullptr when the
    /// hook has nothing; hook exceptions propagate and are not cached.
    std::shared_ptr<const cd::ContentDictionary> get(const std::string& cdbase, const std::string& cdname);

    cd::DefinitionLookup definition(const om::Symbol& s, const cd::WarningSink& warn = {});

    std::size_t size() const;

private:
    using Key = std::pair<std::string, std::string>;

    FetchHook hook_;
    mutable std::shared_mutex mutex_;
    std::map<Key, std::shared_ptr<const cd::ContentDictionary>> cds_;
    std::set<Key> misses_;
};

/// A numeric operation of the base environment.
struct BaseOp {
    std::size_t min_args = 1;
    std::size_t max_args = 1;  // SIZE_MAX for n-ary
    std::function<double(std::span<const double>)> fn;
};

/// Symbols the evaluator knows natively. Everything else must be expanded
/// away through definitions first.
class BaseEnv {
public:
    /// plus, minus, times, divide, power, unary_minus and abs from arith1.
    static BaseEnv arith1();

    void add(om::Symbol s, BaseOp op) { ops_[std::move(s)] = std::move(op); }
    const BaseOp* find(const om::Symbol& s) const;
    bool contains(const om::Symbol& s) const { return find(s) != nullptr; }
    std::size_t size() const { return ops_.size(); }

private:
    std::map<om::Symbol, BaseOp> ops_;
};

// --- errors ---------------------------------------------------------------

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(const std::string& name) : Error("unbound variable $" + name) {}
};

class DepthExceeded : public Error {
public:
    DepthExceeded(std::vector<std::string> chain, int limit);
    const std::vector<std::string>& chain() const { return chain_; }

private:
    std::vector<std::string> chain_;
};

class ArityMismatch : public Error {
public:
    ArityMismatch(const std::string& symbol, std::size_t expected, std::size_t got);
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public EvaluationError {
public:
    explicit DivisionByZero(std::string location)
        : EvaluationError("division by zero in " + location), location_(std::move(location)) {}
    const std::string& location() const { return location_; }

private:
    std::string location_;
};

class UnknownSymbol : public EvaluationError {
public:
    explicit UnknownSymbol(const std::string& uri) : EvaluationError("no numeric meaning for " + uri) {}
};

class FreeVariable : public EvaluationError {
public:
    explicit FreeVariable(const std::string& name) : EvaluationError("free variable $" + name) {}
};

class NonNumericLeaf : public EvaluationError {
public:
    explicit NonNumericLeaf(const std::string& what) : EvaluationError("non-numeric leaf " + what) {}
};

// --- term operations ------------------------------------------------------

/// Replaces free variables by their bindings. Variables bound by an inner
/// OMBIND shadow the map; bound variables are renamed when a substituted
/// value would otherwise be captured.
om::Object substitute(const om::Object& body, const std::map<std::string, om::Object>& bindings);

struct ExpandResult {
    om::Object term;
    /// Hash URIs of non-base symbols left in place for lack of a definition.
    std::set<std::string> residual;
};

/// Innermost-first unfolding of definitional FMPs until only base symbols,
/// numbers and undefined symbols remain. A chain of more than `max_depth`
/// nested unfoldings raises DepthExceeded.
ExpandResult expand(const om::Object& obj, CdStore& store, const BaseEnv& base, int max_depth = 32,
                    const cd::WarningSink& warn = {});

/// 64-bit evaluation of a closed term over the base environment.
double evaluate(const om::Object& obj, const BaseEnv& base);

// --- dataset pipeline -----------------------------------------------------

struct PipelineOptions {
    ann::Vocabulary vocab;
    int max_depth = ann::kDefaultMaxDepth;
    cd::WarningSink warn;
};

/// Translate, expand and evaluate one derivation against `data`.
double compute_derivation(const ann::Derivation& d, const ann::Dataset& data, CdStore& store, const BaseEnv& base,
                          const PipelineOptions& opts);

enum class Status { Match, Mismatch, Uncomputable };

struct VerificationEntry {
    rdf::Iri point;
    Status status = Status::Uncomputable;
    std::optional<double> stored;
    std::optional<double> computed;
    std::optional<double> delta;
    std::string reason;
};

struct VerificationReport {
    std::vector<VerificationEntry> entries;  // one per derived point, by IRI

    std::size_t count(Status s) const;
    /// One line per point: `MATCH|MISMATCH|UNCOMPUTABLE <iri> ...`.
    std::string to_text() const;
    /// JSON array of {id, status, stored, computed, delta, reason}.
    std::string to_json() const;
};

/// Match iff |stored - computed| <= tolerance * max(1, |stored|).
VerificationReport verify_dataset(const rdf::Graph& g, CdStore& store, const BaseEnv& base, double tolerance,
                                  const PipelineOptions& opts);

class RecomputeError : public Error {
public:
    RecomputeError(const rdf::Iri& point, const std::string& cause)
        : Error("cannot recompute " + point.str() + ": " + cause) {}
};

/// Derived points in dependency order; throws CyclicDerivation on a cycle.
std::vector<rdf::Iri> dependency_order(const ann::Dataset& data);

/// Copy of `g` where every derived point's rdf:value holds the freshly
/// computed value as a canonical xsd:decimal.
rdf::Graph recompute(const rdf::Graph& g, CdStore& store, const BaseEnv& base, const PipelineOptions& opts);

struct QueryResult {
    rdf::Iri region;
    double increase = 0;
    double before = 0;
    double after = 0;
};

class NoComputableRegion : public Error {
public:
    NoComputableRegion() : Error("no region has the metric computable at both times") {}
};

/// Region with the largest metric increase from `t1` to `t2`. Metric values
/// are the derived points whose function is `metric`; their region is the
/// dimension typed `region_class`, their time is whichever of t1/t2 they
/// carry. Ties go to the lexicographically smallest region IRI.
QueryResult query_max_increase(const rdf::Graph& g, const rdf::Iri& metric, const rdf::Iri& region_class,
                               const rdf::Iri& t1, const rdf::Iri& t2, CdStore& store, const BaseEnv& base,
                               const PipelineOptions& opts);

}  // namespace omld::rewrite
