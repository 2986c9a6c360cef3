#include "omld/cd.hpp"

#include "omld/xml.hpp"

namespace omld::cd {

MissingElement::MissingElement(std::string path)
    : Error("missing element " + path), path_(std::move(path)) {}

DuplicateSymbol::DuplicateSymbol(std::string name)
    : Error("duplicate symbol definition '" + name + "'"), name_(std::move(name)) {}

const SymbolDefinition* ContentDictionary::find(std::string_view n) const {
    for (const auto& d : definitions)
        if (d.name == n) return &d;
    return nullptr;
}

namespace {

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// OMS elements inside a CD that name the CD itself without an explicit
// cdbase belong to the CD's own base, not to the OpenMath default.
om::Object rebase_own_symbols(const om::Object& obj, const ContentDictionary& cd) {
    if (cd.cdbase == om::kDefaultCdBase) return obj;
    if (auto* s = obj.as<om::Symbol>()) {
        if (s->cd == cd.cdname && s->cdbase == om::kDefaultCdBase) return om::symbol(cd.cdbase, s->cd, s->name);
        return obj;
    }
    if (auto* a = obj.as<om::Application>()) {
        std::vector<om::Object> args;
        for (const auto& arg : a->args) args.push_back(rebase_own_symbols(arg, cd));
        return om::apply(rebase_own_symbols(a->head, cd), std::move(args));
    }
    if (auto* b = obj.as<om::Binding>())
        return om::bind(rebase_own_symbols(b->binder, cd), b->vars, rebase_own_symbols(b->body, cd));
    return obj;
}

SymbolDefinition parse_definition(const xml::Element& e, const ContentDictionary& cd) {
    SymbolDefinition def;
    const auto* name = e.child("Name");
    if (!name) throw MissingElement("/CD/CDDefinition/Name");
    def.name = trim(name->text);
    if (def.name.empty()) throw MissingElement("/CD/CDDefinition/Name (empty)");
    if (const auto* d = e.child("Description")) def.description = trim(d->text);
    for (const auto* cmp : e.children_named("CMP")) def.cmps.push_back(cmp->text);
    for (const auto* fmp : e.children_named("FMP")) {
        if (fmp->children.size() != 1) throw om::EncodingError("FMP", "expected exactly one OMOBJ");
        def.fmps.push_back(rebase_own_symbols(om::from_element(fmp->children.front()), cd));
    }
    return def;
}

}  // namespace

ContentDictionary parse_cd_xml(std::string_view text, std::optional<rdf::Iri> source_url) {
    auto root = xml::parse(text);
    if (root.name != "CD") throw MissingElement("/CD");
    ContentDictionary cd;
    cd.source_url = std::move(source_url);
    const auto* name = root.child("CDName");
    if (!name) throw MissingElement("/CD/CDName");
    cd.cdname = trim(name->text);
    if (!om::is_ncname(cd.cdname)) throw MissingElement("/CD/CDName (not a valid name)");
    if (const auto* base = root.child("CDBase")) {
        auto b = trim(base->text);
        if (!b.empty()) cd.cdbase = b;
    }
    if (const auto* d = root.child("Description")) cd.description = trim(d->text);

    for (const auto* def_elem : root.children_named("CDDefinition")) {
        auto def = parse_definition(*def_elem, cd);
        if (cd.find(def.name)) throw DuplicateSymbol(def.name);
        cd.definitions.push_back(std::move(def));
    }
    return cd;
}

namespace {

void write_definition(const SymbolDefinition& def, std::string& out) {
    out += "  <CDDefinition>\n";
    out += "    <Name>" + xml::escape_text(def.name) + "</Name>\n";
    if (!def.description.empty()) out += "    <Description>" + xml::escape_text(def.description) + "</Description>\n";
    for (const auto& cmp : def.cmps) out += "    <CMP>" + xml::escape_text(cmp) + "</CMP>\n";
    for (const auto& fmp : def.fmps) out += "    <FMP>" + om::serialize_om_xml(fmp, true) + "</FMP>\n";
    out += "  </CDDefinition>\n";
}

std::string header(const ContentDictionary& cd) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<CD xmlns=\"http://www.openmath.org/OpenMathCD\">\n";
    out += "  <CDName>" + xml::escape_text(cd.cdname) + "</CDName>\n";
    if (cd.cdbase != om::kDefaultCdBase) out += "  <CDBase>" + xml::escape_text(cd.cdbase) + "</CDBase>\n";
    if (!cd.description.empty()) out += "  <Description>" + xml::escape_text(cd.description) + "</Description>\n";
    return out;
}

}  // namespace

std::string serialize_cd_xml(const ContentDictionary& cd) {
    std::string out = header(cd);
    for (const auto& def : cd.definitions) write_definition(def, out);
    return out + "</CD>\n";
}

std::string serialize_single_definition(const ContentDictionary& cd, const SymbolDefinition& def) {
    std::string out = header(cd);
    write_definition(def, out);
    return out + "</CD>\n";
}

namespace {

bool is_eq(const om::Object& head) {
    auto* s = head.as<om::Symbol>();
    return s && s->cdbase == om::kDefaultCdBase && s->cd == "relation1" && s->name == "eq";
}

std::optional<DefinitionalFmp> as_definition(const om::Object& fmp, const om::Symbol& self) {
    auto* app = fmp.as<om::Application>();
    if (!app || !is_eq(app->head) || app->args.size() != 2) return std::nullopt;
    const auto& lhs = app->args[0];
    const auto& body = app->args[1];

    DefinitionalFmp def{self, {}, body};
    if (auto* s = lhs.as<om::Symbol>()) {
        if (*s != self) return std::nullopt;
    } else if (auto* call = lhs.as<om::Application>()) {
        auto* head = call->head.as<om::Symbol>();
        if (!head || *head != self) return std::nullopt;
        std::set<std::string> seen;
        for (const auto& arg : call->args) {
            auto* v = arg.as<om::Variable>();
            if (!v || !seen.insert(v->name).second) return std::nullopt;
            def.params.push_back(*v);
        }
    } else {
        return std::nullopt;
    }

    std::set<std::string> params;
    for (const auto& p : def.params) params.insert(p.name);
    for (const auto& v : om::free_variables(body))
        if (!params.count(v)) return std::nullopt;
    return def;
}

}  // namespace

DefinitionLookup find_definition(const ContentDictionary& cd, std::string_view name, const WarningSink& warn) {
    const auto* def = cd.find(name);
    if (!def) return NoSuchSymbol{};
    auto self = cd.symbol(name);
    std::optional<DefinitionalFmp> first;
    for (const auto& fmp : def->fmps) {
        auto candidate = as_definition(fmp, self);
        if (!candidate) continue;
        if (!first) {
            first = std::move(candidate);
        } else if (warn) {
            warn("symbol " + cd.cdname + "#" + std::string(name) +
                 " has more than one definitional FMP; using the first");
        }
    }
    if (first) return *first;
    return NotDefinitional{};
}

std::vector<TypedLink> extract_links(const ContentDictionary& cd, const std::set<std::string>& predicates) {
    auto as_iri = [](const om::Object& o) -> std::optional<rdf::Iri> {
        if (auto* s = o.as<om::Symbol>()) return om::symbol_iri(*s);
        if (auto* str = o.as<om::String>(); str && rdf::has_scheme(str->value)) return rdf::Iri(str->value);
        return std::nullopt;
    };
    std::vector<TypedLink> links;
    for (const auto& def : cd.definitions) {
        for (const auto& fmp : def.fmps) {
            auto* app = fmp.as<om::Application>();
            if (!app || app->args.size() != 2) continue;
            auto* pred = app->head.as<om::Symbol>();
            if (!pred) continue;
            auto pred_iri = om::symbol_iri(*pred);
            if (!predicates.count(pred_iri.str())) continue;
            auto subject = as_iri(app->args[0]);
            auto object = as_iri(app->args[1]);
            if (subject && object) links.push_back(TypedLink{*subject, pred_iri, *object});
        }
    }
    return links;
}

}  // namespace omld::cd
