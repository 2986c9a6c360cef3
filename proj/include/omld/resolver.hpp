#pragma once

#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "omld/cd.hpp"
#include "omld/om.hpp"
#include "omld/rdf.hpp"
#include "omld/rewrite.hpp"

namespace omld::resolver {

struct HttpResponse {
    int status = 0;
    std::string content_type;
    std::string location;
    std::string body;
};

/// One HTTP GET without redirect handling. `url` never carries a fragment.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url, const std::string& accept) = 0;
};

/// cpp-httplib backed transport for http:// and https:// URLs.
class HttplibTransport : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(10)) : timeout_(timeout) {}
    HttpResponse get(const std::string& url, const std::string& accept) override;

private:
    std::chrono::seconds timeout_;
};

/// Decorator that records every request passed through it.
class RecordingTransport : public HttpTransport {
public:
    struct Request {
        std::string url;
        std::string accept;
    };

    explicit RecordingTransport(std::shared_ptr<HttpTransport> inner) : inner_(std::move(inner)) {}
    HttpResponse get(const std::string& url, const std::string& accept) override;

    std::vector<Request> requests() const;
    std::size_t count() const;
    void clear();

private:
    std::shared_ptr<HttpTransport> inner_;
    mutable std::mutex mutex_;
    std::vector<Request> requests_;
};

class FetchError : public Error {
public:
    explicit FetchError(const std::string& what, std::optional<int> status = std::nullopt)
        : Error("fetch error: " + what), status_(status) {}
    std::optional<int> status() const { return status_; }

private:
    std::optional<int> status_;
};

class TooManyRedirects : public FetchError {
public:
    TooManyRedirects(const std::string& url, int limit)
        : FetchError("more than " + std::to_string(limit) + " redirects from " + url) {}
};

class SymbolNotInCd : public Error {
public:
    SymbolNotInCd(const std::string& name, const std::string& cd)
        : Error("symbol '" + name + "' is not defined in CD " + cd) {}
};

class UnparseableBody : public Error {
public:
    UnparseableBody(const std::string& content_type, const std::string& detail)
        : Error("cannot use response of type '" + content_type + "': " + detail), content_type_(content_type) {}
    const std::string& content_type() const { return content_type_; }

private:
    std::string content_type_;
};

struct FetchResult {
    rdf::Iri final_url;
    int status = 0;
    std::string content_type;
    std::string body;
    std::vector<rdf::Iri> redirect_chain;
    std::chrono::system_clock::time_point retrieved_at;
};

/// `a;q=1.0, b;q=0.9, ...` by list position.
std::string accept_header(const std::vector<std::string>& types);

/// Media type without parameters, lower-cased.
std::string media_type(std::string_view content_type);

/// GET with content negotiation. The fragment is stripped before the
/// request; 301/302/303/307/308 are followed up to `max_redirects` times.
FetchResult negotiate_fetch(HttpTransport& transport, const rdf::Iri& url, const std::vector<std::string>& accept,
                            int max_redirects = 5);

struct ResolverOptions {
    std::chrono::seconds ttl{300};
    int max_redirects = 5;
    /// Longest-prefix URL rewrites applied before a request, e.g. to serve
    /// `http://example.org` from a local mirror. Cache keys stay logical.
    std::map<std::string, std::string> rewrites;
    std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

/// Dereferences CD and symbol URIs, caching parsed CDs by fragment-free
/// URL. Concurrent requests for the same URL share one fetch.
class Resolver {
public:
    explicit Resolver(std::shared_ptr<HttpTransport> transport, ResolverOptions opts = {});

    /// CD document at `url` (fragment ignored), from cache when fresh.
    std::shared_ptr<const cd::ContentDictionary> fetch_cd(const rdf::Iri& url);

    /// Hash URIs fetch the whole CD; slash URIs try the per-symbol document
    /// first and fall back to the CD on 404. Full CDs are added to `store`.
    cd::SymbolDefinition dereference_symbol(const om::SymbolUri& u, rewrite::CdStore& store);

    /// Fetch hook for CdStore: GET `cdbase/cdname`; 404 means "no such CD".
    rewrite::CdStore::FetchHook store_hook();

    std::string rewrite_url(const std::string& url) const;

private:
    struct CacheEntry {
        std::shared_ptr<const cd::ContentDictionary> cd;
        std::chrono::steady_clock::time_point expires_at;
    };
    using CdPtr = std::shared_ptr<const cd::ContentDictionary>;

    CdPtr load(const std::string& key);

    std::shared_ptr<HttpTransport> transport_;
    ResolverOptions opts_;
    std::mutex mutex_;
    std::map<std::string, CacheEntry> cache_;
    std::map<std::string, std::shared_future<CdPtr>> in_flight_;
};

}  // namespace omld::resolver
