#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "omld/annotations.hpp"
#include "omld/om.hpp"
#include "omld/rdf.hpp"

// Random inputs and structural oracles shared by the unit tests and the
// acceptance run.
namespace gen {

using namespace omld::rdf;
using omld::BigInt;
using omld::om::Object;
using omld::om::Variable;

inline std::string xsd_ns(const std::string& local) { return std::string(kXsdNs) + local; }

// Blank-node-bijection check by backtracking.
inline bool isomorphic(const std::vector<Triple>& a, const std::vector<Triple>& b) {
    if (a.size() != b.size()) return false;
    auto labels = [](const std::vector<Triple>& ts) {
        std::map<std::string, int> uses;
        for (const auto& t : ts) {
            if (auto* s = std::get_if<BlankNode>(&t.subject)) uses[s->label] += 1;
            if (auto* o = std::get_if<BlankNode>(&t.object)) uses[o->label] += 100;
        }
        return uses;
    };
    auto la = labels(a), lb = labels(b);
    if (la.size() != lb.size()) return false;

    std::set<std::string> target;
    for (const auto& t : b) target.insert(to_ntriples(t));

    std::vector<std::string> order;
    for (const auto& [l, n] : la) order.push_back(l);
    std::map<std::string, std::string> mapping;
    std::set<std::string> used;

    auto rename = [&](const Term& t) -> Term {
        if (auto* bn = std::get_if<BlankNode>(&t)) return BlankNode{mapping.at(bn->label)};
        return t;
    };
    std::function<bool(std::size_t)> search = [&](std::size_t i) {
        if (i == order.size()) {
            for (const auto& t : a)
                if (!target.count(to_ntriples(Triple{rename(t.subject), t.predicate, rename(t.object)}))) return false;
            return true;
        }
        for (const auto& [cand, n] : lb) {
            if (used.count(cand) || n != la[order[i]]) continue;
            mapping[order[i]] = cand;
            used.insert(cand);
            if (search(i + 1)) return true;
            used.erase(cand);
        }
        return false;
    };
    return search(0);
}

inline std::string escape_nt(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string nt(const Term& t) {
    if (auto* i = std::get_if<Iri>(&t)) return "<" + i->str() + ">";
    if (auto* b = std::get_if<BlankNode>(&t)) return "_:" + b->label;
    const auto& l = std::get<Literal>(t);
    std::string out = "\"" + escape_nt(l.lexical) + "\"";
    if (!l.language.empty()) return out + "@" + l.language;
    if (l.datatype) return out + "^^<" + l.datatype->str() + ">";
    return out;
}

struct Generated {
    std::string text;
    std::vector<Triple> triples;
};

inline Generated generate_graph(std::mt19937& rng) {
    static const std::vector<std::string> iris = {
        "http://ex.org/a",          "http://ex.org/b",         "http://ex.org/ns#c",  "http://ex.org/ns#d-e",
        "http://ex.org/path/f.g",   "http://ex.org/path/",     "urn:isbn:0451450523", "http://ex.org/ns#_x1",
        "http://other.org/x?y=1&z", "http://ex.org/%C3%A9t%C3%A9",
    };
    static const std::vector<std::string> strings = {
        "",        "plain",         "with \"quotes\"", "back\\slash", "line\nbreak", "tab\there",
        "caf\xc3\xa9", "\xe6\x97\xa5\xe6\x9c\xac", "a # not a comment", "ends with dot.", "'single'",
    };
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

    auto literal = [&]() -> Term {
        switch (pick(5)) {
            case 0: return Literal{strings[pick(strings.size())], std::nullopt, {}};
            case 1: return Literal{strings[pick(strings.size())], std::nullopt, pick(2) ? "en" : "de-CH"};
            case 2: return Literal{std::to_string(static_cast<int>(pick(2000)) - 1000), Iri(xsd_ns("integer")), {}};
            case 3: return Literal{"1." + std::to_string(pick(100)), Iri(xsd_ns("decimal")), {}};
            default: return Literal{strings[pick(strings.size())], Iri("http://ex.org/ns#dt"), {}};
        }
    };
    auto blank = [&]() -> Term { return BlankNode{"n" + std::to_string(pick(4))}; };
    auto iri = [&]() -> Term { return Iri(iris[pick(iris.size())]); };

    Generated g;
    g.text = "@prefix ex: <http://ex.org/> .\n@prefix ns: <http://ex.org/ns#> .\n";
    std::set<std::string> seen;
    std::size_t n = 1 + pick(15);
    for (std::size_t i = 0; i < n; ++i) {
        Term s = pick(3) ? iri() : blank();
        Iri p = pick(5) ? Iri(iris[pick(4)]) : Iri(std::string(kRdfNs) + "type");
        Term o = pick(3) == 0 ? literal() : pick(2) ? iri() : blank();
        Triple t{s, p, o};
        if (!seen.insert(to_ntriples(t)).second) continue;
        g.triples.push_back(t);
        g.text += nt(s) + " " + nt(p) + " " + nt(o) + " .\n";
    }
    return g;
}

class ObjectGenerator {
public:
    explicit ObjectGenerator(unsigned seed) : rng_(seed) {}

    Object next(int depth = 0) {
        switch (pick(depth >= 4 ? 5 : 7)) {
            case 0: return random_symbol();
            case 1: return random_integer();
            case 2: return omld::om::floating(random_double());
            case 3: return omld::om::variable(name());
            case 4: return omld::om::string(kStrings[pick(kStrings.size())]);
            case 5: {
                std::vector<Object> args;
                for (std::size_t i = 0, n = 1 + pick(4); i < n; ++i) args.push_back(next(depth + 1));
                return omld::om::apply(pick(4) ? random_symbol() : next(depth + 1), std::move(args));
            }
            default: {
                std::vector<Variable> vars;
                std::set<std::string> seen;
                for (std::size_t i = 0, n = 1 + pick(3); i < n; ++i) {
                    auto v = name();
                    if (seen.insert(v).second) vars.push_back({v});
                }
                return omld::om::bind(random_symbol(), std::move(vars), next(depth + 1));
            }
        }
    }

private:
    static inline const std::vector<std::string> kStrings = {
        "", "plain", "a < b & c > d", "\"quoted\" 'too'", " spaced ", "caf\xc3\xa9", "x]]>y",
    };

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    std::string name() {
        static const char* stems[] = {"x", "y", "_z", "long-name", "a.b", "v1"};
        return stems[pick(6)] + (pick(2) ? std::to_string(pick(10)) : "");
    }

    Object random_symbol() {
        static const char* bases[] = {"", "http://example.org/cd", "http://x.org/a/b/"};
        static const char* cds[] = {"arith1", "statistics", "my-cd", "c_2"};
        return omld::om::symbol(bases[pick(3)], cds[pick(4)], name());
    }

    Object random_integer() {
        if (pick(4) == 0) {
            BigInt big = 1;
            for (std::size_t i = 0, n = 1 + pick(40); i < n; ++i) big *= 1000000007;
            return omld::om::integer(pick(2) ? big : BigInt(-big));
        }
        return omld::om::integer(static_cast<long long>(rng_()) % 100000);
    }

    double random_double() {
        switch (pick(6)) {
            case 0: return std::numeric_limits<double>::infinity();
            case 1: return -0.0;
            case 2: return std::ldexp(static_cast<double>(rng_() % 1000), -static_cast<int>(pick(60)));
            default: {
                double mag = std::pow(10.0, std::uniform_real_distribution<double>(-300, 300)(rng_));
                return pick(2) ? mag : -mag;
            }
        }
    }

    std::mt19937 rng_;
};


struct GeneratedDerivation {
    omld::ann::Derivation expected;
    std::optional<Object> object;
    std::map<std::size_t, Iri> sources;
};

/// f(args) where each argument is a traced data point or an inline constant.
inline GeneratedDerivation generate_derivation(std::mt19937& rng, int index) {
    using omld::Decimal;
    namespace om = omld::om;
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    static const char* functions[] = {"plus", "times", "divide", "minus", "power"};
    const std::string ahs = "http://example.org/ns/ahs/";

    GeneratedDerivation out;
    auto& d = out.expected;
    d.point = Iri(ahs + "point-" + std::to_string(index));
    d.function = om::symbol_iri(om::Symbol{pick(3) ? std::string(om::kDefaultCdBase) : "http://example.org/cd",
                                           pick(3) ? "arith1" : "statistics", functions[pick(5)]});
    std::vector<Object> args;
    for (int pos = 1, n = 1 + pick(6); pos <= n; ++pos) {
        if (pick(3)) {
            Iri src(ahs + "src-" + std::to_string(pick(1000)));
            d.args.push_back({pos, src});
            out.sources.emplace(pos, src);
            args.push_back(om::integer(pick(100)));
        } else {
            Decimal c = pick(2) ? Decimal(pick(100000) - 50000)
                                : Decimal::from_double(std::ldexp(static_cast<double>(pick(1 << 20)), -pick(30)));
            d.args.push_back({pos, c});
            args.push_back(omld::ann::number(c));
        }
    }
    out.object = om::apply(om::symbol(om::symbol_from_iri(d.function)), args);
    return out;
}

inline omld::ann::SourceLookup lookup_in(const std::map<std::size_t, Iri>& sources) {
    return [&sources](std::size_t pos, const Object&) -> std::optional<Iri> {
        auto it = sources.find(pos);
        if (it == sources.end()) return std::nullopt;
        return it->second;
    };
}

}  // namespace gen
