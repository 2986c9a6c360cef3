#include "omld/rdf.hpp"

#include <algorithm>
#include <cctype>

namespace omld::rdf {

bool has_scheme(std::string_view s) {
    auto colon = s.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(colon), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
    });
}

Iri::Iri(std::string value) : value_(std::move(value)) {
    if (!has_scheme(value_)) throw Error("not an absolute IRI: '" + value_ + "'");
}

Iri Iri::without_fragment() const {
    auto hash = value_.find('#');
    return hash == std::string::npos ? *this : Iri(value_.substr(0, hash));
}

Iri xsd(std::string_view local) { return Iri(std::string(kXsdNs) + std::string(local)); }

Literal typed_literal(std::string lexical, std::string_view xsd_local) {
    return Literal{std::move(lexical), xsd(xsd_local), {}};
}

namespace {

std::string escape_string(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
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

struct NTriplesVisitor {
    std::string operator()(const Iri& i) const { return "<" + i.str() + ">"; }
    std::string operator()(const BlankNode& b) const { return "_:" + b.label; }
    std::string operator()(const Literal& l) const {
        std::string out = "\"" + escape_string(l.lexical) + "\"";
        if (!l.language.empty()) out += "@" + l.language;
        else if (l.datatype) out += "^^<" + l.datatype->str() + ">";
        return out;
    }
};

}  // namespace

std::string to_ntriples(const Term& t) { return std::visit(NTriplesVisitor{}, t); }

std::string to_ntriples(const Triple& t) {
    return to_ntriples(t.subject) + " " + to_ntriples(Term(t.predicate)) + " " + to_ntriples(t.object) + " .";
}

bool Graph::insert(Triple t) {
    if (is_literal(t.subject)) throw Error("literal in subject position");
    auto key = to_ntriples(t);
    if (triples_.count(key)) return false;
    by_subject_[to_ntriples(t.subject)].insert(key);
    by_predicate_[t.predicate.str()].insert(key);
    by_object_[to_ntriples(t.object)].insert(key);
    for (const Term* term : {&t.subject, &t.object})
        if (auto* b = std::get_if<BlankNode>(term)) blank_labels_.insert(b->label);
    triples_.emplace(std::move(key), std::move(t));
    return true;
}

bool Graph::erase(const Triple& t) {
    auto key = to_ntriples(t);
    auto it = triples_.find(key);
    if (it == triples_.end()) return false;
    by_subject_[to_ntriples(t.subject)].erase(key);
    by_predicate_[t.predicate.str()].erase(key);
    by_object_[to_ntriples(t.object)].erase(key);
    triples_.erase(it);
    return true;
}

std::vector<Triple> Graph::match(const std::optional<Term>& s, const std::optional<Iri>& p,
                                 const std::optional<Term>& o) const {
    static const std::set<Key> kNone;
    auto lookup = [](const auto& index, const std::string& k) -> const std::set<Key>& {
        auto it = index.find(k);
        return it == index.end() ? kNone : it->second;
    };

    // Drive from the most selective bound index, filter on the rest.
    const std::set<Key>* driver = nullptr;
    if (s) driver = &lookup(by_subject_, to_ntriples(*s));
    if (o) {
        const auto& cand = lookup(by_object_, to_ntriples(*o));
        if (!driver || cand.size() < driver->size()) driver = &cand;
    }
    if (p) {
        const auto& cand = lookup(by_predicate_, p->str());
        if (!driver || cand.size() < driver->size()) driver = &cand;
    }

    std::vector<Triple> out;
    auto accept = [&](const Triple& t) {
        if (s && t.subject != *s) return;
        if (p && t.predicate != *p) return;
        if (o && t.object != *o) return;
        out.push_back(t);
    };
    if (driver) {
        for (const auto& key : *driver) accept(triples_.at(key));
    } else {
        for (const auto& [key, t] : triples_) accept(t);
    }
    return out;
}

std::optional<Term> Graph::object(const Term& s, const Iri& p) const {
    auto found = match(s, p, std::nullopt);
    if (found.empty()) return std::nullopt;
    return found.front().object;
}

std::vector<Triple> Graph::triples() const {
    std::vector<Triple> out;
    out.reserve(triples_.size());
    for (const auto& [key, t] : triples_) out.push_back(t);
    return out;
}

BlankNode Graph::fresh_blank() {
    std::string label;
    do {
        label = "b" + std::to_string(blank_counter_++);
    } while (blank_labels_.count(label));
    blank_labels_.insert(label);
    return BlankNode{label};
}

void Graph::merge(const Graph& other) {
    std::map<std::string, BlankNode> renamed;
    auto rename = [&](const Term& t) -> Term {
        auto* b = std::get_if<BlankNode>(&t);
        if (!b) return t;
        auto it = renamed.find(b->label);
        if (it == renamed.end()) it = renamed.emplace(b->label, fresh_blank()).first;
        return it->second;
    };
    for (const auto& [key, t] : other.triples_) insert(Triple{rename(t.subject), t.predicate, rename(t.object)});
    for (const auto& [prefix, iri] : other.prefixes_) prefixes_.try_emplace(prefix, iri);
}

SyntaxError::SyntaxError(std::size_t line, std::size_t column, std::string expected)
    : Error("turtle syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": expected " +
            expected),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

UnknownPrefix::UnknownPrefix(std::string prefix)
    : Error("unknown prefix '" + prefix + ":'"), prefix_(std::move(prefix)) {}

}  // namespace omld::rdf
