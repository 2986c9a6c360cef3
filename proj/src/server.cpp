#include "omld/server.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "omld/xml.hpp"

namespace omld::server {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim_base(std::string_view base) {
    std::string out(base);
    while (!out.empty() && (out.back() == '/' || out.back() == '#')) out.pop_back();
    return out;
}

std::string minted_base(const cd::ContentDictionary& cd, std::string_view base) {
    return trim_base(base.empty() ? std::string_view(cd.cdbase) : base);
}

}  // namespace

Catalog load_directory(const fs::path& dir, std::string base_iri, std::set<std::string> link_predicates) {
    if (!fs::is_directory(dir)) throw Error("CD directory does not exist: " + dir.string());
    Catalog catalog{trim_base(base_iri), std::move(link_predicates), {}};
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".ocd") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto cd = cd::parse_cd_xml(read_file(f));
        auto name = cd.cdname;
        if (!catalog.cds.emplace(name, std::move(cd)).second)
            throw Error("two CDs named '" + name + "' in " + dir.string());
    }
    return catalog;
}

// ---------------------------------------------------------------------------
// content negotiation

namespace {

struct AcceptRange {
    std::string type;
    double q = 1.0;
};

std::vector<AcceptRange> parse_accept(std::string_view header) {
    std::vector<AcceptRange> out;
    std::size_t pos = 0;
    while (pos <= header.size()) {
        auto comma = header.find(',', pos);
        auto item = header.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        pos = comma == std::string_view::npos ? header.size() + 1 : comma + 1;

        AcceptRange range;
        std::size_t field = 0;
        while (field <= item.size()) {
            auto semi = item.find(';', field);
            auto part = item.substr(field, semi == std::string_view::npos ? std::string_view::npos : semi - field);
            field = semi == std::string_view::npos ? item.size() + 1 : semi + 1;
            auto first = part.find_first_not_of(" \t");
            if (first == std::string_view::npos) continue;
            auto last = part.find_last_not_of(" \t");
            std::string token(part.substr(first, last - first + 1));
            if (range.type.empty()) {
                std::transform(token.begin(), token.end(), token.begin(), [](unsigned char c) { return std::tolower(c); });
                range.type = token;
            } else if (token.rfind("q=", 0) == 0) {
                range.q = std::strtod(token.c_str() + 2, nullptr);
            }
        }
        if (!range.type.empty()) out.push_back(std::move(range));
    }
    return out;
}

}  // namespace

std::string negotiate(std::string_view accept, const std::vector<std::string>& offered) {
    if (offered.empty()) return {};
    auto ranges = parse_accept(accept);
    if (ranges.empty()) return offered.front();

    std::string best;
    double best_q = 0;
    for (const auto& type : offered) {
        auto slash = type.find('/');
        std::string wildcard = type.substr(0, slash) + "/*";
        int specificity = 0;
        double q = 0;
        for (const auto& r : ranges) {
            int s = r.type == type ? 3 : r.type == wildcard ? 2 : r.type == "*/*" ? 1 : 0;
            if (s > specificity) {
                specificity = s;
                q = r.q;
            }
        }
        if (specificity > 0 && q > best_q) {
            best = type;
            best_q = q;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// representations

std::string vocabulary_namespace(std::string_view base) { return trim_base(base) + "/vocab#"; }

std::string render_cd_html(const cd::ContentDictionary& cd, std::string_view base,
                           const std::set<std::string>& link_predicates) {
    using xml::escape_attribute;
    using xml::escape_text;
    const std::string root = minted_base(cd, base);
    const std::string vocab = vocabulary_namespace(root);
    const std::string cd_uri = root + "/" + cd.cdname;

    std::map<std::string, std::vector<cd::TypedLink>> links_by_subject;
    for (auto& link : cd::extract_links(cd, link_predicates)) links_by_subject[link.subject.str()].push_back(link);

    std::string out;
    out += "<!DOCTYPE html>\n";
    out += "<html xmlns=\"http://www.w3.org/1999/xhtml\" prefix=\"cdv: " + escape_attribute(vocab) + "\">\n";
    out += "<head>\n<meta charset=\"utf-8\"/>\n<title>" + escape_text(cd.cdname) + "</title>\n";
    out += "<link rel=\"alternate\" type=\"application/openmath+xml\" href=\"" + escape_attribute(cd_uri) + "\"/>\n";
    out += "</head>\n";
    out += "<body about=\"" + escape_attribute(cd_uri) + "\" typeof=\"cdv:ContentDictionary\">\n";
    out += "<h1 property=\"cdv:name\">" + escape_text(cd.cdname) + "</h1>\n";
    if (!cd.description.empty())
        out += "<p property=\"cdv:description\">" + escape_text(cd.description) + "</p>\n";

    for (const auto& def : cd.definitions) {
        const std::string sym_uri = cd_uri + "#" + def.name;
        const std::string own_uri = om::symbol_iri(cd.symbol(def.name)).str();
        out += "<section id=\"" + escape_attribute(def.name) + "\" about=\"" + escape_attribute(sym_uri) +
               "\" typeof=\"cdv:Symbol\">\n";
        out += "<h2 property=\"cdv:name\">" + escape_text(def.name) + "</h2>\n";
        out += "<link property=\"cdv:inCD\" href=\"" + escape_attribute(cd_uri) + "\"/>\n";
        if (!def.description.empty())
            out += "<p property=\"cdv:description\">" + escape_text(def.description) + "</p>\n";
        for (const auto& cmp : def.cmps) out += "<p class=\"cmp\">" + escape_text(cmp) + "</p>\n";
        for (const auto& fmp : def.fmps)
            out += "<pre class=\"fmp\"><code>" + escape_text(om::serialize_om_xml(fmp)) + "</code></pre>\n";
        if (auto it = links_by_subject.find(own_uri); it != links_by_subject.end()) {
            out += "<ul class=\"links\">\n";
            for (const auto& link : it->second)
                out += "<li><a rel=\"" + escape_attribute(link.predicate.str()) + "\" href=\"" +
                       escape_attribute(link.object.str()) + "\">" + escape_text(link.object.str()) + "</a></li>\n";
            out += "</ul>\n";
        }
        out += "</section>\n";
    }
    out += "</body>\n</html>\n";
    return out;
}

rdf::Graph cd_to_rdf(const cd::ContentDictionary& cd, const rdf::Iri& base,
                     const std::set<std::string>& link_predicates) {
    const std::string root = trim_base(base.str());
    const std::string vocab = vocabulary_namespace(root);
    const rdf::Iri type(std::string(rdf::kRdfNs) + "type");
    const rdf::Iri name(vocab + "name");
    const rdf::Iri description(vocab + "description");
    const rdf::Iri in_cd(vocab + "inCD");
    const rdf::Iri cd_res(root + "/" + cd.cdname);

    rdf::Graph g;
    g.set_prefix("cdv", vocab);
    g.set_prefix("rdf", std::string(rdf::kRdfNs));
    g.set_prefix("rdfs", "http://www.w3.org/2000/01/rdf-schema#");
    g.set_prefix(cd.cdname, cd_res.str() + "#");

    g.insert({cd_res, type, rdf::Iri(vocab + "ContentDictionary")});
    g.insert({cd_res, name, rdf::Literal{cd.cdname, std::nullopt, {}}});
    if (!cd.description.empty()) g.insert({cd_res, description, rdf::Literal{cd.description, std::nullopt, {}}});

    std::map<std::string, rdf::Iri> minted;
    for (const auto& def : cd.definitions) {
        rdf::Iri sym(cd_res.str() + "#" + def.name);
        minted.emplace(om::symbol_iri(cd.symbol(def.name)).str(), sym);
        g.insert({sym, type, rdf::Iri(vocab + "Symbol")});
        g.insert({sym, name, rdf::Literal{def.name, std::nullopt, {}}});
        if (!def.description.empty()) g.insert({sym, description, rdf::Literal{def.description, std::nullopt, {}}});
        g.insert({sym, in_cd, cd_res});
    }
    for (const auto& link : cd::extract_links(cd, link_predicates)) {
        auto it = minted.find(link.subject.str());
        g.insert({it == minted.end() ? link.subject : it->second, link.predicate, link.object});
    }
    return g;
}

// ---------------------------------------------------------------------------
// routing

namespace {

Response text_response(int status, std::string body) {
    Response r;
    r.status = status;
    r.content_type = "text/plain; charset=utf-8";
    r.body = std::move(body);
    return r;
}

std::string catalog_base(const Catalog& catalog, const cd::ContentDictionary& cd) {
    return catalog.base_iri.empty() ? trim_base(cd.cdbase) : catalog.base_iri;
}

Response index_page(const Catalog& catalog) {
    Response r;
    r.content_type = "text/html; charset=utf-8";
    r.body = "<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\">\n<head><meta charset=\"utf-8\"/>"
             "<title>Content Dictionaries</title></head>\n<body>\n<ul>\n";
    for (const auto& [name, cd] : catalog.cds)
        r.body += "<li><a href=\"/" + xml::escape_attribute(name) + "\">" + xml::escape_text(name) + "</a></li>\n";
    r.body += "</ul>\n</body>\n</html>\n";
    return r;
}

}  // namespace

Response route(const Catalog& catalog, const Request& req, std::string_view default_representation) {
    if (req.method != "GET" && req.method != "HEAD") {
        auto r = text_response(405, "method not allowed\n");
        r.headers["Allow"] = "GET, HEAD";
        return r;
    }
    std::string path = req.path.substr(0, req.path.find('?'));
    if (path == "/" || path.empty()) return index_page(catalog);
    if (path[0] != '/') return text_response(404, "not found\n");
    path.erase(0, 1);

    auto slash = path.find('/');
    if (slash != std::string::npos) {
        auto cd_name = path.substr(0, slash);
        auto symbol = path.substr(slash + 1);
        auto it = catalog.cds.find(cd_name);
        if (it == catalog.cds.end()) return text_response(404, "no such CD: " + cd_name + "\n");
        const auto* def = it->second.find(symbol);
        if (!def) return text_response(404, "SymbolNotFound: " + symbol + " in " + cd_name + "\n");
        Response r;
        r.content_type = std::string(om::kMimeType);
        r.body = cd::serialize_single_definition(it->second, *def);
        return r;
    }

    constexpr std::string_view kXhtml = ".xhtml";
    if (path.size() > kXhtml.size() && path.compare(path.size() - kXhtml.size(), kXhtml.size(), kXhtml) == 0) {
        auto it = catalog.cds.find(path.substr(0, path.size() - kXhtml.size()));
        if (it == catalog.cds.end()) return text_response(404, "no such CD\n");
        Response r;
        r.content_type = "text/html; charset=utf-8";
        r.body = render_cd_html(it->second, catalog_base(catalog, it->second), catalog.link_predicates);
        return r;
    }

    auto it = catalog.cds.find(path);
    if (it == catalog.cds.end()) return text_response(404, "no such CD: " + path + "\n");
    const auto& cd = it->second;

    std::vector<std::string> offered{std::string(default_representation)};
    for (auto t : {om::kMimeType, kHtml, kTurtle})
        if (t != default_representation) offered.emplace_back(t);

    auto chosen = negotiate(req.accept, offered);
    Response r;
    r.headers["Vary"] = "Accept";
    if (chosen == om::kMimeType) {
        r.content_type = std::string(om::kMimeType);
        r.body = cd::serialize_cd_xml(cd);
    } else if (chosen == kHtml) {
        r.status = 303;
        r.headers["Location"] = "/" + cd.cdname + ".xhtml";
        r.content_type = "text/plain; charset=utf-8";
        r.body = "see /" + cd.cdname + ".xhtml\n";
    } else if (chosen == kTurtle) {
        r.content_type = "text/turtle; charset=utf-8";
        r.body = rdf::serialize_turtle(cd_to_rdf(cd, rdf::Iri(catalog_base(catalog, cd)), catalog.link_predicates));
    } else {
        r = text_response(406, "not acceptable; available: " + offered[0] + ", " + offered[1] + ", " + offered[2] + "\n");
        r.headers["Vary"] = "Accept";
    }
    return r;
}

// ---------------------------------------------------------------------------
// CdServer

CdServer::CdServer(ServerConfig config) : config_(std::move(config)), http_(std::make_unique<httplib::Server>()) {
    if (!fs::is_directory(config_.cd_directory))
        throw Error("CD directory does not exist: " + config_.cd_directory.string());
    http_->Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
        auto catalog = snapshot();
        auto out = route(*catalog, Request{req.method, req.path, req.get_header_value("Accept")},
                         config_.default_representation);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        res.set_content(out.body, out.content_type);
    });
}

CdServer::~CdServer() { stop(); }

std::string CdServer::base_iri() const {
    if (!config_.base_iri.empty()) return trim_base(config_.base_iri);
    return "http://" + config_.bind_address + ":" + std::to_string(port_);
}

int CdServer::bind() {
    if (config_.port == 0) {
        port_ = http_->bind_to_any_port(config_.bind_address);
    } else {
        port_ = http_->bind_to_port(config_.bind_address, config_.port) ? config_.port : -1;
    }
    if (port_ < 0) throw Error("cannot bind " + config_.bind_address + ":" + std::to_string(config_.port));
    reload();
    return port_;
}

int CdServer::start() {
    int port = bind();
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return port;
}

void CdServer::run() {
    bind();
    http_->listen_after_bind();
}

void CdServer::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

void CdServer::reload() {
    auto next = std::make_shared<const Catalog>(load_directory(config_.cd_directory, base_iri(), config_.link_predicates));
    std::lock_guard lock(mutex_);
    catalog_ = std::move(next);
}

std::shared_ptr<const Catalog> CdServer::snapshot() const {
    std::lock_guard lock(mutex_);
    return catalog_;
}

}  // namespace omld::server
