#include "omld/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace omld::ann {

namespace {

std::string join_chain(const std::vector<rdf::Iri>& chain) {
    std::string out;
    for (const auto& i : chain) out += (out.empty() ? "" : " -> ") + i.str();
    return out;
}

}  // namespace

BadValueLiteral::BadValueLiteral(const rdf::Iri& point)
    : AnnotationError("rdf:value of " + point.str() + " is not a numeric literal", point) {}
MissingFunction::MissingFunction(const rdf::Iri& point)
    : AnnotationError("derivation of " + point.str() + " has no function IRI", point) {}
BadArgPositions::BadArgPositions(const rdf::Iri& point, const std::string& detail)
    : AnnotationError("argument positions of " + point.str() + " are not 1..n: " + detail, point) {}
MalformedArgument::MalformedArgument(const rdf::Iri& point, const std::string& detail)
    : AnnotationError("malformed argument in derivation of " + point.str() + ": " + detail, point) {}
UnresolvedArgument::UnresolvedArgument(const rdf::Iri& source)
    : AnnotationError("argument " + source.str() + " has neither a value nor a derivation", source) {}
CyclicDerivation::CyclicDerivation(std::vector<rdf::Iri> chain)
    : Error("cyclic derivation: " + join_chain(chain)), chain_(std::move(chain)) {}
DerivationTooDeep::DerivationTooDeep(std::vector<rdf::Iri> chain, int limit)
    : Error("derivation chain deeper than " + std::to_string(limit) + ": " + join_chain(chain)) {}
UntraceableArgument::UntraceableArgument(std::size_t position)
    : Error("argument " + std::to_string(position) + " is neither a number nor traceable to a data point") {}

Vocabulary Vocabulary::from_prefixes(const std::map<std::string, std::string>& prefixes) {
    auto ns = [&](const std::string& p) -> const std::string& {
        auto it = prefixes.find(p);
        if (it == prefixes.end()) throw Error("prefix table lacks '" + p + ":'");
        return it->second;
    };
    return Vocabulary{
        rdf::Iri(ns("rdf") + "value"),        rdf::Iri(ns("rdf") + "type"),
        rdf::Iri(ns("scv") + "dimension"),    rdf::Iri(ns("scv") + "dataset"),
        rdf::Iri(ns("sl") + "computedFrom"),  rdf::Iri(ns("sl") + "function"),
        rdf::Iri(ns("sl") + "arguments"),     rdf::Iri(ns("sl") + "argPosition"),
        rdf::Iri(ns("sl") + "argValue"),
    };
}

namespace {

std::optional<Decimal> numeric_value(const rdf::Term& t) {
    auto* lit = std::get_if<rdf::Literal>(&t);
    if (!lit || !lit->language.empty()) return std::nullopt;
    return Decimal::parse(lit->lexical);
}

std::optional<Decimal> stored_value(const rdf::Graph& g, const rdf::Iri& id, const Vocabulary& v) {
    auto obj = g.object(id, v.value);
    if (!obj) return std::nullopt;
    auto value = numeric_value(*obj);
    if (!value) throw BadValueLiteral(id);
    return value;
}

}  // namespace

std::vector<DataPoint> extract_data_points(const rdf::Graph& g, const Vocabulary& v) {
    std::map<rdf::Iri, DataPoint> points;
    for (const auto& t : g.match(std::nullopt, v.dimension, std::nullopt)) {
        auto* id = std::get_if<rdf::Iri>(&t.subject);
        auto* dim = std::get_if<rdf::Iri>(&t.object);
        if (!id || !dim) continue;
        auto& p = points.try_emplace(*id, DataPoint{*id, {}, std::nullopt, std::nullopt}).first->second;
        p.dimensions.push_back(*dim);
    }
    std::vector<DataPoint> out;
    out.reserve(points.size());
    for (auto& [id, p] : points) {
        std::sort(p.dimensions.begin(), p.dimensions.end());
        p.value = stored_value(g, id, v);
        if (auto ds = g.object(id, v.dataset); ds && rdf::is_iri(*ds)) p.dataset = std::get<rdf::Iri>(*ds);
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

int parse_position(const rdf::Term& t) {
    auto* lit = std::get_if<rdf::Literal>(&t);
    if (!lit) return -1;
    int value = 0;
    const auto& s = lit->lexical;
    auto [ptr, ec] = std::from_chars(s.data() + (!s.empty() && s[0] == '+'), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return -1;
    return value;
}

Derivation read_derivation(const rdf::Graph& g, const rdf::Iri& point, const rdf::Term& node, const Vocabulary& v) {
    auto fn = g.object(node, v.function);
    if (!fn || !rdf::is_iri(*fn)) throw MissingFunction(point);
    Derivation d{point, std::get<rdf::Iri>(*fn), {}};

    for (const auto& t : g.match(node, v.arguments, std::nullopt)) {
        auto pos = g.object(t.object, v.arg_position);
        if (!pos) throw BadArgPositions(point, "argument without position");
        int position = parse_position(*pos);
        if (position < 1) throw BadArgPositions(point, "position '" + rdf::to_ntriples(*pos) + "'");
        auto value = g.object(t.object, v.arg_value);
        if (!value) throw MalformedArgument(point, "argument " + std::to_string(position) + " has no value");
        if (auto* ref = std::get_if<rdf::Iri>(&*value)) {
            d.args.push_back(Argument{position, *ref});
        } else if (auto num = numeric_value(*value)) {
            d.args.push_back(Argument{position, *num});
        } else {
            throw MalformedArgument(point, "argument " + std::to_string(position) + " is not a reference or number");
        }
    }
    std::sort(d.args.begin(), d.args.end(), [](const Argument& a, const Argument& b) { return a.position < b.position; });
    if (d.args.empty()) throw BadArgPositions(point, "no arguments");
    for (std::size_t i = 0; i < d.args.size(); ++i) {
        if (d.args[i].position != static_cast<int>(i + 1))
            throw BadArgPositions(point, "expected position " + std::to_string(i + 1) + ", found " +
                                             std::to_string(d.args[i].position));
    }
    return d;
}

}  // namespace

std::vector<Derivation> extract_derivations(const rdf::Graph& g, const Vocabulary& v, const cd::WarningSink& warn) {
    std::vector<Derivation> out;
    std::set<rdf::Iri> seen;
    for (const auto& t : g.match(std::nullopt, v.computed_from, std::nullopt)) {
        auto* point = std::get_if<rdf::Iri>(&t.subject);
        if (!point) continue;
        if (!seen.insert(*point).second) {
            if (warn) warn(point->str() + " has more than one computedFrom annotation; using the first");
            continue;
        }
        out.push_back(read_derivation(g, *point, t.object, v));
    }
    std::sort(out.begin(), out.end(), [](const Derivation& a, const Derivation& b) { return a.point < b.point; });
    return out;
}

Dataset::Dataset(const rdf::Graph& g, const Vocabulary& v, const cd::WarningSink& warn) {
    for (auto& p : extract_data_points(g, v)) points_.emplace(p.id, std::move(p));
    for (const auto& t : g.match(std::nullopt, v.value, std::nullopt)) {
        auto* id = std::get_if<rdf::Iri>(&t.subject);
        if (!id || points_.count(*id)) continue;
        if (auto num = numeric_value(t.object)) points_.emplace(*id, DataPoint{*id, {}, num, std::nullopt});
    }
    for (auto& d : extract_derivations(g, v, warn)) derivations_.emplace(d.point, std::move(d));
}

const DataPoint* Dataset::point(const rdf::Iri& id) const {
    auto it = points_.find(id);
    return it == points_.end() ? nullptr : &it->second;
}

const Derivation* Dataset::derivation(const rdf::Iri& id) const {
    auto it = derivations_.find(id);
    return it == derivations_.end() ? nullptr : &it->second;
}

void Dataset::set_value(const rdf::Iri& id, Decimal value) {
    auto it = points_.find(id);
    if (it == points_.end()) it = points_.emplace(id, DataPoint{id, {}, std::nullopt, std::nullopt}).first;
    it->second.value = std::move(value);
}

void Dataset::clear_value(const rdf::Iri& id) {
    if (auto it = points_.find(id); it != points_.end()) it->second.value.reset();
}

om::Object number(const Decimal& d) {
    if (d.is_integer()) return om::integer(d.to_integer());
    return om::floating(d.to_double());
}

namespace {

om::Object translate(const Derivation& d, const Dataset& data, std::vector<rdf::Iri>& chain, int max_depth) {
    chain.push_back(d.point);
    if (static_cast<int>(chain.size()) > max_depth) throw DerivationTooDeep(chain, max_depth);
    std::vector<om::Object> args;
    for (const auto& arg : d.args) {
        if (auto* constant = std::get_if<Decimal>(&arg.source)) {
            args.push_back(number(*constant));
            continue;
        }
        const auto& source = std::get<rdf::Iri>(arg.source);
        if (std::find(chain.begin(), chain.end(), source) != chain.end()) {
            auto cycle = chain;
            cycle.push_back(source);
            throw CyclicDerivation(std::move(cycle));
        }
        if (const auto* p = data.point(source); p && p->value) {
            args.push_back(number(*p->value));
        } else if (const auto* sub = data.derivation(source)) {
            args.push_back(translate(*sub, data, chain, max_depth));
        } else {
            throw UnresolvedArgument(source);
        }
    }
    chain.pop_back();
    return om::apply(om::symbol(om::symbol_from_iri(d.function)), std::move(args));
}

}  // namespace

om::Object derivation_to_om(const Derivation& d, const Dataset& data, int max_depth) {
    std::vector<rdf::Iri> chain;
    return translate(d, data, chain, max_depth);
}

rdf::Graph om_to_derivation(const rdf::Iri& point, const om::Object& obj, const SourceLookup& source_of,
                            const Vocabulary& v) {
    auto* app = obj.as<om::Application>();
    if (!app) throw NotAnApplication();
    auto* head = app->head.as<om::Symbol>();
    if (!head) throw NotAnApplication();

    rdf::Graph g;
    auto node = g.fresh_blank();
    g.insert({point, v.computed_from, node});
    g.insert({node, v.function, om::symbol_iri(*head)});
    for (std::size_t i = 0; i < app->args.size(); ++i) {
        const auto& arg = app->args[i];
        const std::size_t position = i + 1;
        rdf::Term value;
        if (auto ref = source_of ? source_of(position, arg) : std::nullopt) {
            value = *ref;
        } else if (auto* n = arg.as<om::Integer>()) {
            value = rdf::typed_literal(n->value.str(), "decimal");
        } else if (auto* f = arg.as<om::Float>()) {
            value = rdf::typed_literal(Decimal::from_double(f->value).to_string(), "decimal");
        } else {
            throw UntraceableArgument(position);
        }
        auto arg_node = g.fresh_blank();
        g.insert({node, v.arguments, arg_node});
        g.insert({arg_node, v.arg_position, rdf::typed_literal(std::to_string(position), "int")});
        g.insert({arg_node, v.arg_value, std::move(value)});
    }
    return g;
}

}  // namespace omld::ann
