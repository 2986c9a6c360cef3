#include <cctype>
#include <map>

#include "omld/rdf.hpp"

namespace omld::rdf {

namespace {

bool is_pn_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || u >= 0x80;
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string resolve_relative(const std::string& ref, const Iri& base) {
    if (has_scheme(ref)) return ref;
    const std::string& b = base.str();
    if (ref.empty()) return base.without_fragment().str();
    if (ref[0] == '#') return base.without_fragment().str() + ref;
    auto scheme_end = b.find("://");
    if (ref[0] == '/') {
        if (scheme_end == std::string::npos) return b.substr(0, b.find(':') + 1) + ref;
        auto path_start = b.find('/', scheme_end + 3);
        return (path_start == std::string::npos ? b : b.substr(0, path_start)) + ref;
    }
    auto stem = base.without_fragment().str();
    auto slash = stem.rfind('/');
    if (slash == std::string::npos || (scheme_end != std::string::npos && slash < scheme_end + 3))
        return stem + "/" + ref;
    return stem.substr(0, slash + 1) + ref;
}

class TurtleParser {
public:
    TurtleParser(std::string_view text, Iri base) : text_(text), base_(std::move(base)) {}

    Graph run() {
        skip_ws();
        while (!at_end()) {
            if (peek() == '@' || starts_with_keyword("PREFIX") || starts_with_keyword("BASE")) {
                directive();
            } else {
                seen_triples_ = true;
                triples();
                expect('.', "'.' after triples");
            }
            skip_ws();
        }
        return std::move(graph_);
    }

private:
    // --- character level -------------------------------------------------
    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    char get() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    [[noreturn]] void fail(std::string expected) const { throw SyntaxError(line_, col_, std::move(expected)); }

    void skip_ws() {
        while (!at_end()) {
            char c = peek();
            if (c == '#') {
                while (!at_end() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    void expect(char c, const char* what) {
        skip_ws();
        if (peek() != c) fail(what);
        get();
    }

    bool starts_with_keyword(std::string_view kw) const {
        if (text_.size() - pos_ < kw.size()) return false;
        for (std::size_t i = 0; i < kw.size(); ++i)
            if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
        char after = peek(kw.size());
        return after == '\0' || std::isspace(static_cast<unsigned char>(after)) || after == '<';
    }

    // --- directives ------------------------------------------------------
    void directive() {
        bool sparql_style = peek() != '@';
        if (!sparql_style) get();
        std::string word;
        while (std::isalpha(static_cast<unsigned char>(peek()))) word += get();
        std::string lowered;
        for (char c : word) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        skip_ws();
        if (lowered == "prefix") {
            std::string prefix;
            while (is_pn_char(peek()) || (peek() == '.' && is_pn_char(peek(1)))) prefix += get();
            if (peek() != ':') fail("':' after prefix name");
            get();
            skip_ws();
            auto iri = iri_ref();
            graph_.set_prefix(prefix, iri.str());
        } else if (lowered == "base") {
            if (seen_triples_) fail("@base only before the first triple");
            base_ = iri_ref();
        } else {
            fail("@prefix or @base");
        }
        if (!sparql_style) expect('.', "'.' after directive");
    }

    // --- terms -----------------------------------------------------------
    Iri iri_ref() {
        if (peek() != '<') fail("IRI reference");
        get();
        std::string raw;
        while (!at_end() && peek() != '>') {
            char c = get();
            if (c == '\n' || c == ' ') fail("'>' closing IRI");
            if (c == '\\') {
                raw += unicode_escape();
                continue;
            }
            raw += c;
        }
        if (at_end()) fail("'>' closing IRI");
        get();
        return Iri(resolve_relative(raw, base_));
    }

    std::string unicode_escape() {
        char kind = at_end() ? '\0' : get();
        int len = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
        if (len == 0) fail("\\u or \\U escape");
        unsigned long cp = 0;
        for (int i = 0; i < len; ++i) {
            char h = at_end() ? '\0' : get();
            if (!std::isxdigit(static_cast<unsigned char>(h))) fail("hex digit");
            cp = cp * 16 + static_cast<unsigned long>(std::isdigit(static_cast<unsigned char>(h))
                                                          ? h - '0'
                                                          : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
        }
        std::string out;
        append_utf8(out, cp);
        return out;
    }

    Iri prefixed_name() {
        std::string prefix;
        while (is_pn_char(peek()) || (peek() == '.' && is_pn_char(peek(1)))) prefix += get();
        if (peek() != ':') fail("prefixed name");
        get();
        std::string local;
        while (true) {
            char c = peek();
            if (is_pn_char(c) || c == ':' || c == '%') {
                local += get();
            } else if (c == '.' && (is_pn_char(peek(1)) || peek(1) == ':')) {
                local += get();
            } else if (c == '\\' && peek(1) != '\0') {
                get();
                local += get();
            } else {
                break;
            }
        }
        auto it = graph_.prefixes().find(prefix);
        if (it == graph_.prefixes().end()) throw UnknownPrefix(prefix);
        return Iri(it->second + local);
    }

    Iri iri() {
        if (peek() == '<') return iri_ref();
        return prefixed_name();
    }

    BlankNode labeled_blank() {
        get();  // '_'
        if (peek() != ':') fail("':' in blank node label");
        get();
        std::string label;
        while (is_pn_char(peek()) || (peek() == '.' && is_pn_char(peek(1)))) label += get();
        if (label.empty()) fail("blank node label");
        auto it = labels_.find(label);
        if (it == labels_.end()) it = labels_.emplace(label, graph_.fresh_blank()).first;
        return it->second;
    }

    std::string string_body() {
        char quote = get();
        if (peek() == quote && peek(1) == quote) fail("single-line string (long strings are not supported)");
        std::string out;
        while (true) {
            if (at_end() || peek() == '\n') fail("closing quote");
            char c = get();
            if (c == quote) break;
            if (c == '\\') {
                char e = at_end() ? '\0' : peek();
                switch (e) {
                    case 't': get(); out += '\t'; break;
                    case 'n': get(); out += '\n'; break;
                    case 'r': get(); out += '\r'; break;
                    case 'b': get(); out += '\b'; break;
                    case 'f': get(); out += '\f'; break;
                    case '"': get(); out += '"'; break;
                    case '\'': get(); out += '\''; break;
                    case '\\': get(); out += '\\'; break;
                    case 'u':
                    case 'U': out += unicode_escape(); break;
                    default: fail("string escape");
                }
                continue;
            }
            out += c;
        }
        return out;
    }

    Literal string_literal() {
        Literal lit{string_body(), std::nullopt, {}};
        if (peek() == '@') {
            get();
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') lit.language += get();
            if (lit.language.empty()) fail("language tag");
        } else if (peek() == '^' && peek(1) == '^') {
            get();
            get();
            lit.datatype = iri();
        }
        return lit;
    }

    Literal numeric_literal() {
        std::string lex;
        if (peek() == '+' || peek() == '-') lex += get();
        bool digits = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            lex += get();
            digits = true;
        }
        const char* type = "integer";
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            lex += get();
            while (std::isdigit(static_cast<unsigned char>(peek()))) lex += get();
            digits = true;
            type = "decimal";
        }
        if (!digits) fail("number");
        if (peek() == 'e' || peek() == 'E') {
            lex += get();
            if (peek() == '+' || peek() == '-') lex += get();
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("exponent digits");
            while (std::isdigit(static_cast<unsigned char>(peek()))) lex += get();
            type = "double";
        }
        return typed_literal(std::move(lex), type);
    }

    bool keyword_here(std::string_view kw) const {
        if (text_.compare(pos_, kw.size(), kw) != 0) return false;
        char after = peek(kw.size());
        return !is_pn_char(after) && after != ':';
    }

    Term subject() {
        skip_ws();
        char c = peek();
        if (c == '_' && peek(1) == ':') return labeled_blank();
        if (c == '[') return property_list_node();
        if (c == '(') fail("subject (collections are not supported)");
        if (c == '<' || is_pn_char(c) || c == ':') return iri();
        fail("subject");
    }

    Iri verb() {
        skip_ws();
        if (peek() == 'a' && keyword_here("a")) {
            get();
            return Iri(std::string(kRdfNs) + "type");
        }
        if (peek() == '<' || is_pn_char(peek()) || peek() == ':') return iri();
        fail("predicate");
    }

    Term object() {
        skip_ws();
        char c = peek();
        if (c == '"' || c == '\'') return string_literal();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
            return numeric_literal();
        if (c == '_' && peek(1) == ':') return labeled_blank();
        if (c == '[') return property_list_node();
        if (c == '(') fail("object (collections are not supported)");
        if (keyword_here("true") || keyword_here("false")) {
            std::string lex = c == 't' ? "true" : "false";
            for (std::size_t i = 0; i < lex.size(); ++i) get();
            return typed_literal(lex, "boolean");
        }
        if (c == '<' || is_pn_char(c) || c == ':') return iri();
        fail("object");
    }

    // '[' predicateObjectList? ']'
    Term property_list_node() {
        get();
        BlankNode node = graph_.fresh_blank();
        skip_ws();
        if (peek() != ']') predicate_object_list(node);
        expect(']', "']' closing blank node");
        return node;
    }

    void predicate_object_list(const Term& subj) {
        while (true) {
            Iri pred = verb();
            while (true) {
                Term obj = object();
                graph_.insert(Triple{subj, pred, std::move(obj)});
                skip_ws();
                if (peek() != ',') break;
                get();
            }
            skip_ws();
            if (peek() != ';') return;
            while (peek() == ';') {
                get();
                skip_ws();
            }
            char c = peek();
            if (c == '.' || c == ']' || at_end()) return;
        }
    }

    void triples() {
        skip_ws();
        bool anon_subject = peek() == '[';
        Term subj = subject();
        skip_ws();
        if (anon_subject && (peek() == '.')) return;
        predicate_object_list(subj);
    }

    std::string_view text_;
    Iri base_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    bool seen_triples_ = false;
    Graph graph_;
    std::map<std::string, BlankNode> labels_;
};

bool is_safe_local(std::string_view local) {
    if (local.empty()) return true;
    if (local.front() == '-' || local.front() == '.' || local.back() == '.') return false;
    for (char c : local)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

class TurtleWriter {
public:
    explicit TurtleWriter(const Graph& g) : g_(g) {}

    std::string run() {
        std::string out;
        for (const auto& [prefix, ns] : g_.prefixes()) out += "@prefix " + prefix + ": <" + ns + "> .\n";
        if (!out.empty() && !g_.empty()) out += "\n";

        std::string current;
        for (const auto& t : g_.triples()) {
            auto subj = term(t.subject);
            if (subj != current) {
                if (!current.empty()) out += " .\n";
                out += subj + "\n    ";
                current = subj;
            } else {
                out += " ;\n    ";
            }
            out += predicate(t.predicate) + " " + term(t.object);
        }
        if (!current.empty()) out += " .\n";
        return out;
    }

private:
    std::string iri(const Iri& i) const {
        const std::string* best_prefix = nullptr;
        std::size_t best_len = 0;
        for (const auto& [prefix, ns] : g_.prefixes()) {
            if (ns.size() > best_len && i.str().compare(0, ns.size(), ns) == 0 &&
                is_safe_local(std::string_view(i.str()).substr(ns.size()))) {
                best_prefix = &prefix;
                best_len = ns.size();
            }
        }
        if (best_prefix) return *best_prefix + ":" + i.str().substr(best_len);
        return "<" + i.str() + ">";
    }

    std::string predicate(const Iri& p) const {
        if (p.str() == std::string(kRdfNs) + "type") return "a";
        return iri(p);
    }

    std::string term(const Term& t) const {
        if (auto* i = std::get_if<Iri>(&t)) return iri(*i);
        if (auto* l = std::get_if<Literal>(&t); l && l->datatype && l->language.empty()) {
            Literal plain{l->lexical, std::nullopt, {}};
            return to_ntriples(Term(plain)) + "^^" + iri(*l->datatype);
        }
        return to_ntriples(t);
    }

    const Graph& g_;
};

}  // namespace

Graph parse_turtle(std::string_view text, const Iri& base) { return TurtleParser(text, base).run(); }

std::string serialize_turtle(const Graph& g) { return TurtleWriter(g).run(); }

}  // namespace omld::rdf
