#include "omld/resolver.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include <httplib.h>


namespace omld::resolver {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string target;  // path[?query]
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw FetchError("not a URL: " + url);
    auto path = url.find('/', scheme_end + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

std::string scheme_of(const std::string& url) {
    auto colon = url.find(':');
    std::string s = url.substr(0, colon == std::string::npos ? 0 : colon);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string strip_fragment(const std::string& url) { return url.substr(0, url.find('#')); }

std::string resolve_location(const std::string& base, const std::string& location) {
    if (rdf::has_scheme(location)) return location;
    auto parts = split_url(base);
    if (!location.empty() && location[0] == '/') return parts.origin + location;
    auto dir = parts.target.substr(0, parts.target.rfind('/') + 1);
    return parts.origin + dir + location;
}

}  // namespace

HttpResponse HttplibTransport::get(const std::string& url, const std::string& accept) {
    auto parts = split_url(url);
    httplib::Client client(parts.origin);
    client.set_follow_location(false);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    auto res = client.Get(parts.target, httplib::Headers{{"Accept", accept}});
    if (!res) throw FetchError("transport failure for " + url + ": " + httplib::to_string(res.error()));
    HttpResponse out;
    out.status = res->status;
    out.content_type = res->get_header_value("Content-Type");
    out.location = res->get_header_value("Location");
    out.body = res->body;
    return out;
}

HttpResponse RecordingTransport::get(const std::string& url, const std::string& accept) {
    {
        std::lock_guard lock(mutex_);
        requests_.push_back({url, accept});
    }
    return inner_->get(url, accept);
}

std::vector<RecordingTransport::Request> RecordingTransport::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

std::size_t RecordingTransport::count() const {
    std::lock_guard lock(mutex_);
    return requests_.size();
}

void RecordingTransport::clear() {
    std::lock_guard lock(mutex_);
    requests_.clear();
}

std::string accept_header(const std::vector<std::string>& types) {
    std::string out;
    for (std::size_t i = 0; i < types.size(); ++i) {
        double q = std::max(0.1, 1.0 - 0.1 * static_cast<double>(i));
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.1f", q);
        if (i) out += ", ";
        out += types[i] + ";q=" + buf;
    }
    return out;
}

std::string media_type(std::string_view content_type) {
    auto semi = content_type.find(';');
    auto mt = content_type.substr(0, semi);
    auto first = mt.find_first_not_of(" \t");
    auto last = mt.find_last_not_of(" \t");
    std::string out = first == std::string_view::npos ? "" : std::string(mt.substr(first, last - first + 1));
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

FetchResult negotiate_fetch(HttpTransport& transport, const rdf::Iri& url, const std::vector<std::string>& accept,
                            int max_redirects) {
    if (accept.empty()) throw Error("accept list must not be empty");
    std::string current = strip_fragment(url.str());
    auto scheme = scheme_of(current);
    if (scheme != "http" && scheme != "https") throw FetchError("unsupported URL scheme '" + scheme + "'");

    const auto header = accept_header(accept);
    FetchResult result;
    while (true) {
        auto res = transport.get(current, header);
        bool redirect = res.status == 301 || res.status == 302 || res.status == 303 || res.status == 307 ||
                        res.status == 308;
        if (redirect) {
            if (res.location.empty()) throw FetchError("redirect without Location from " + current, res.status);
            if (static_cast<int>(result.redirect_chain.size()) >= max_redirects)
                throw TooManyRedirects(url.str(), max_redirects);
            current = strip_fragment(resolve_location(current, res.location));
            auto next_scheme = scheme_of(current);
            if (next_scheme != "http" && next_scheme != "https")
                throw FetchError("redirect to unsupported scheme '" + next_scheme + "'");
            result.redirect_chain.emplace_back(current);
            continue;
        }
        if (res.status != 200) throw FetchError("HTTP " + std::to_string(res.status) + " for " + current, res.status);
        result.final_url = rdf::Iri(current);
        result.status = res.status;
        result.content_type = res.content_type;
        result.body = std::move(res.body);
        result.retrieved_at = std::chrono::system_clock::now();
        return result;
    }
}

// ---------------------------------------------------------------------------

Resolver::Resolver(std::shared_ptr<HttpTransport> transport, ResolverOptions opts)
    : transport_(std::move(transport)), opts_(std::move(opts)) {}

std::string Resolver::rewrite_url(const std::string& url) const {
    const std::pair<const std::string, std::string>* best = nullptr;
    for (const auto& entry : opts_.rewrites)
        if (url.compare(0, entry.first.size(), entry.first) == 0 && (!best || entry.first.size() > best->first.size()))
            best = &entry;
    if (!best) return url;
    return best->second + url.substr(best->first.size());
}

Resolver::CdPtr Resolver::load(const std::string& key) {
    auto res = negotiate_fetch(*transport_, rdf::Iri(rewrite_url(key)), {std::string(om::kMimeType)},
                               opts_.max_redirects);
    if (media_type(res.content_type) != om::kMimeType)
        throw UnparseableBody(res.content_type, "expected " + std::string(om::kMimeType));
    try {
        return std::make_shared<const cd::ContentDictionary>(cd::parse_cd_xml(res.body, rdf::Iri(key)));
    } catch (const Error& e) {
        throw UnparseableBody(res.content_type, e.what());
    }
}

std::shared_ptr<const cd::ContentDictionary> Resolver::fetch_cd(const rdf::Iri& url) {
    const std::string key = strip_fragment(url.str());
    std::promise<CdPtr> promise;
    {
        std::unique_lock lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            if (opts_.clock() < it->second.expires_at) return it->second.cd;
            cache_.erase(it);
        }
        if (auto it = in_flight_.find(key); it != in_flight_.end()) {
            auto shared = it->second;
            lock.unlock();
            return shared.get();
        }
        in_flight_.emplace(key, promise.get_future().share());
    }

    CdPtr cd;
    try {
        cd = load(key);
    } catch (...) {
        std::lock_guard lock(mutex_);
        in_flight_.erase(key);
        promise.set_exception(std::current_exception());
        throw;
    }
    std::lock_guard lock(mutex_);
    cache_[key] = CacheEntry{cd, opts_.clock() + opts_.ttl};
    in_flight_.erase(key);
    promise.set_value(cd);
    return cd;
}

cd::SymbolDefinition Resolver::dereference_symbol(const om::SymbolUri& u, rewrite::CdStore& store) {
    const std::string doc_url = om::render_symbol_uri(u).without_fragment().str();
    auto from_full_cd = [&](const std::string& url) {
        auto cd = fetch_cd(rdf::Iri(url));
        store.add(*cd);
        const auto* def = cd->find(u.name);
        if (!def) throw SymbolNotInCd(u.name, url);
        return *def;
    };

    if (u.scheme == om::UriScheme::Hash) return from_full_cd(doc_url);

    // Slash URI: the per-symbol document, then the whole CD one level up.
    try {
        auto doc = fetch_cd(rdf::Iri(doc_url));
        const auto* def = doc->find(u.name);
        if (!def) throw SymbolNotInCd(u.name, doc_url);
        return *def;
    } catch (const FetchError& e) {
        if (e.status() != 404) throw;
    }
    return from_full_cd(doc_url.substr(0, doc_url.rfind('/')));
}

rewrite::CdStore::FetchHook Resolver::store_hook() {
    return [this](const std::string& cdbase, const std::string& cdname) -> std::optional<cd::ContentDictionary> {
        std::string base = cdbase;
        while (!base.empty() && base.back() == '/') base.pop_back();
        try {
            return *fetch_cd(rdf::Iri(base + "/" + cdname));
        } catch (const FetchError& e) {
            if (e.status() == 404) return std::nullopt;
            throw;
        }
    };
}

}  // namespace omld::resolver
