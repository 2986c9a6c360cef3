#include "omld/om.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "omld/xml.hpp"

namespace omld::om {

EncodingError::EncodingError(std::string element, std::string reason)
    : Error("OpenMath encoding error in <" + element + ">: " + reason),
      element_(std::move(element)),
      reason_(std::move(reason)) {}

MalformedSymbolUri::MalformedSymbolUri(const std::string& iri) : Error("malformed symbol URI: " + iri) {}

bool is_ncname(std::string_view s) {
    if (s.empty()) return false;
    auto start_ok = [](unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; };
    if (!start_ok(static_cast<unsigned char>(s[0]))) return false;
    for (char ch : s) {
        auto c = static_cast<unsigned char>(ch);
        if (!(start_ok(c) || std::isdigit(c) || c == '-' || c == '.')) return false;
    }
    return true;
}

namespace {

template <class T>
Object make(T value) {
    return Object(std::make_shared<const Node>(std::move(value)));
}

}  // namespace

Object symbol(std::string cdbase, std::string cd, std::string name) {
    if (!is_ncname(cd)) throw InvalidObject("invalid CD name '" + cd + "'");
    if (!is_ncname(name)) throw InvalidObject("invalid symbol name '" + name + "'");
    if (cdbase.empty()) cdbase = kDefaultCdBase;
    return make(Symbol{std::move(cdbase), std::move(cd), std::move(name)});
}

Object symbol(const Symbol& s) { return symbol(s.cdbase, s.cd, s.name); }
Object sym(std::string cd, std::string name) { return symbol(std::string(kDefaultCdBase), std::move(cd), std::move(name)); }
Object integer(BigInt v) { return make(Integer{std::move(v)}); }
Object floating(double v) { return make(Float{v}); }
Object string(std::string v) { return make(String{std::move(v)}); }

Object variable(std::string name) {
    if (!is_ncname(name)) throw InvalidObject("bad variable name '" + name + "'");
    return make(Variable{std::move(name)});
}

Object apply(Object head, std::vector<Object> args) {
    if (args.empty()) throw InvalidObject("application needs at least one argument");
    return make(Application{std::move(head), std::move(args)});
}

Object bind(Object binder, std::vector<Variable> vars, Object body) {
    if (vars.empty()) throw InvalidObject("binding needs at least one variable");
    std::set<std::string> seen;
    for (const auto& v : vars)
        if (!is_ncname(v.name) || !seen.insert(v.name).second)
            throw InvalidObject("binding variables must be distinct names");
    return make(Binding{std::move(binder), std::move(vars), std::move(body)});
}

namespace {

void collect_free(const Object& obj, std::set<std::string>& bound, std::set<std::string>& out) {
    if (auto* v = obj.as<Variable>()) {
        if (!bound.count(v->name)) out.insert(v->name);
    } else if (auto* a = obj.as<Application>()) {
        collect_free(a->head, bound, out);
        for (const auto& arg : a->args) collect_free(arg, bound, out);
    } else if (auto* b = obj.as<Binding>()) {
        collect_free(b->binder, bound, out);
        std::vector<std::string> added;
        for (const auto& v : b->vars)
            if (bound.insert(v.name).second) added.push_back(v.name);
        collect_free(b->body, bound, out);
        for (const auto& n : added) bound.erase(n);
    }
}

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string required_attribute(const xml::Element& e, std::string_view key) {
    auto v = e.attribute(key);
    if (!v) throw EncodingError(e.name, "missing attribute '" + std::string(key) + "'");
    return *v;
}

BigInt parse_omi(const xml::Element& e) {
    std::string text = trim(e.text);
    bool negative = !text.empty() && text[0] == '-';
    std::string_view digits = std::string_view(text).substr(negative ? 1 : 0);
    bool hex = !digits.empty() && digits[0] == 'x';
    if (hex) digits.remove_prefix(1);
    if (digits.empty()) throw EncodingError("OMI", "empty integer");
    BigInt value = 0;
    for (char c : digits) {
        auto u = static_cast<unsigned char>(c);
        if (hex ? !std::isxdigit(u) : !std::isdigit(u)) throw EncodingError("OMI", "bad digit in '" + text + "'");
        int d = std::isdigit(u) ? c - '0' : std::toupper(u) - 'A' + 10;
        value = value * (hex ? 16 : 10) + d;
    }
    return negative ? BigInt(-value) : value;
}

double parse_omf(const xml::Element& e) {
    if (e.attribute("hex")) throw EncodingError("OMF", "hex encoding is not supported");
    auto dec = e.attribute("dec");
    if (!dec) throw EncodingError("OMF", "missing attribute 'dec'");
    std::string text = trim(*dec);
    if (text == "INF") return std::numeric_limits<double>::infinity();
    if (text == "-INF") return -std::numeric_limits<double>::infinity();
    if (text == "NaN") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || text.find_first_of("xXnN") != std::string::npos)
        throw EncodingError("OMF", "bad decimal '" + text + "'");
    return v;
}

std::vector<const xml::Element*> element_children(const xml::Element& e) {
    std::vector<const xml::Element*> out;
    for (const auto& c : e.children) out.push_back(&c);
    return out;
}

Object convert(const xml::Element& e, const std::string& cdbase_scope) {
    const std::string scope = e.attribute("cdbase").value_or(cdbase_scope);
    const auto& n = e.name;
    if (n == "OMOBJ") {
        auto kids = element_children(e);
        if (kids.size() != 1) throw EncodingError(n, "expected exactly one child object");
        return convert(*kids[0], scope);
    }
    if (n == "OMS") {
        auto cd = required_attribute(e, "cd");
        auto name = required_attribute(e, "name");
        if (!is_ncname(cd) || !is_ncname(name)) throw EncodingError(n, "cd and name must be NCNames");
        return symbol(scope, cd, name);
    }
    if (n == "OMI") return integer(parse_omi(e));
    if (n == "OMF") return floating(parse_omf(e));
    if (n == "OMV") {
        auto name = required_attribute(e, "name");
        if (name.empty()) throw EncodingError(n, "empty variable name");
        return variable(name);
    }
    if (n == "OMSTR") return string(e.text);
    if (n == "OMA") {
        auto kids = element_children(e);
        if (kids.size() < 2) throw EncodingError(n, "application needs a head and at least one argument");
        Object head = convert(*kids[0], scope);
        std::vector<Object> args;
        for (std::size_t i = 1; i < kids.size(); ++i) args.push_back(convert(*kids[i], scope));
        return apply(std::move(head), std::move(args));
    }
    if (n == "OMBIND") {
        auto kids = element_children(e);
        if (kids.size() != 3 || kids[1]->name != "OMBVAR")
            throw EncodingError(n, "expected binder, OMBVAR and body");
        std::vector<Variable> vars;
        std::set<std::string> seen;
        for (const auto& v : kids[1]->children) {
            if (v.name != "OMV") throw EncodingError("OMBVAR", "only OMV children are supported");
            auto name = required_attribute(v, "name");
            if (name.empty() || !seen.insert(name).second)
                throw EncodingError("OMBVAR", "variables must be nonempty and distinct");
            vars.push_back(Variable{name});
        }
        if (vars.empty()) throw EncodingError("OMBVAR", "no bound variables");
        return bind(convert(*kids[0], scope), std::move(vars), convert(*kids[2], scope));
    }
    throw EncodingError(n, "unsupported element");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "INF" : "-INF";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

void write(const Object& obj, std::string& out) {
    if (auto* s = obj.as<Symbol>()) {
        out += "<OMS";
        if (s->cdbase != kDefaultCdBase) out += " cdbase=\"" + xml::escape_attribute(s->cdbase) + "\"";
        out += " cd=\"" + s->cd + "\" name=\"" + s->name + "\"/>";
    } else if (auto* i = obj.as<Integer>()) {
        out += "<OMI>" + i->value.str() + "</OMI>";
    } else if (auto* f = obj.as<Float>()) {
        out += "<OMF dec=\"" + format_double(f->value) + "\"/>";
    } else if (auto* v = obj.as<Variable>()) {
        out += "<OMV name=\"" + xml::escape_attribute(v->name) + "\"/>";
    } else if (auto* str = obj.as<String>()) {
        out += "<OMSTR>" + xml::escape_text(str->value) + "</OMSTR>";
    } else if (auto* a = obj.as<Application>()) {
        out += "<OMA>";
        write(a->head, out);
        for (const auto& arg : a->args) write(arg, out);
        out += "</OMA>";
    } else if (auto* b = obj.as<Binding>()) {
        out += "<OMBIND>";
        write(b->binder, out);
        out += "<OMBVAR>";
        for (const auto& v : b->vars) out += "<OMV name=\"" + xml::escape_attribute(v.name) + "\"/>";
        out += "</OMBVAR>";
        write(b->body, out);
        out += "</OMBIND>";
    }
}

void text(const Object& obj, std::string& out) {
    if (auto* s = obj.as<Symbol>()) {
        out += s->cd + "." + s->name;
    } else if (auto* i = obj.as<Integer>()) {
        out += i->value.str();
    } else if (auto* f = obj.as<Float>()) {
        out += format_double(f->value);
    } else if (auto* v = obj.as<Variable>()) {
        out += "$" + v->name;
    } else if (auto* str = obj.as<String>()) {
        out += "\"" + str->value + "\"";
    } else if (auto* a = obj.as<Application>()) {
        text(a->head, out);
        out += "(";
        for (std::size_t k = 0; k < a->args.size(); ++k) {
            if (k) out += ", ";
            text(a->args[k], out);
        }
        out += ")";
    } else if (auto* b = obj.as<Binding>()) {
        text(b->binder, out);
        out += "[";
        for (std::size_t k = 0; k < b->vars.size(); ++k) out += (k ? ", $" : "$") + b->vars[k].name;
        out += "](";
        text(b->body, out);
        out += ")";
    }
}

}  // namespace

std::set<std::string> free_variables(const Object& obj) {
    std::set<std::string> bound, out;
    collect_free(obj, bound, out);
    return out;
}

Object from_element(const xml::Element& e) { return convert(e, std::string(kDefaultCdBase)); }

Object parse_om_xml(std::string_view text) { return from_element(xml::parse(text)); }

std::string serialize_element(const Object& obj) {
    std::string out;
    write(obj, out);
    return out;
}

std::string serialize_om_xml(const Object& obj, bool with_namespace) {
    std::string out = with_namespace ? "<OMOBJ xmlns=\"" + std::string(kNamespace) + "\">" : "<OMOBJ>";
    write(obj, out);
    return out + "</OMOBJ>";
}

std::string to_text(const Object& obj) {
    std::string out;
    text(obj, out);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string strip_trailing_slash(std::string s) {
    while (!s.empty() && s.back() == '/') s.pop_back();
    return s;
}

}  // namespace

rdf::Iri render_symbol_uri(const SymbolUri& u) {
    std::string base = strip_trailing_slash(u.cdbase);
    return rdf::Iri(base + "/" + u.cd + (u.scheme == UriScheme::Hash ? "#" : "/") + u.name);
}

SymbolUri parse_symbol_uri(const rdf::Iri& iri) {
    const std::string& s = iri.str();
    auto authority = s.find("://");
    if (authority == std::string::npos) throw MalformedSymbolUri(s);
    auto path_start = s.find('/', authority + 3);
    auto hash = s.find('#');
    if (path_start == std::string::npos || (hash != std::string::npos && hash < path_start))
        throw MalformedSymbolUri(s);

    if (hash != std::string::npos) {
        std::string name = s.substr(hash + 1);
        std::string stem = s.substr(0, hash);
        auto slash = stem.rfind('/');
        std::string cd = stem.substr(slash + 1);
        if (!is_ncname(name) || !is_ncname(cd) || slash < path_start) throw MalformedSymbolUri(s);
        return SymbolUri{UriScheme::Hash, stem.substr(0, slash), cd, name};
    }

    auto last = s.rfind('/');
    if (last <= path_start) throw MalformedSymbolUri(s);
    auto second = s.rfind('/', last - 1);
    if (second == std::string::npos || second < path_start) throw MalformedSymbolUri(s);
    std::string name = s.substr(last + 1);
    std::string cd = s.substr(second + 1, last - second - 1);
    if (!is_ncname(name) || !is_ncname(cd)) throw MalformedSymbolUri(s);
    return SymbolUri{UriScheme::Slash, s.substr(0, second), cd, name};
}

rdf::Iri symbol_iri(const Symbol& s) { return render_symbol_uri(SymbolUri{UriScheme::Hash, s.cdbase, s.cd, s.name}); }

Symbol symbol_from_iri(const rdf::Iri& iri) {
    auto u = parse_symbol_uri(iri);
    return Symbol{u.cdbase, u.cd, u.name};
}

}  // namespace omld::om
