#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "omld/cd.hpp"
#include "omld/rdf.hpp"

namespace httplib {
class Server;
}

namespace omld::server {

inline constexpr std::string_view kHtml = "text/html";
inline constexpr std::string_view kTurtle = "text/turtle";

struct ServerConfig {
    std::string bind_address = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::filesystem::path cd_directory;
    /// Base under which symbol and CD URIs are minted; no trailing `#` or `/`.
    std::string base_iri;
    std::string default_representation = std::string(om::kMimeType);
    std::set<std::string> link_predicates = {cd::kSeeAlso};
};

/// Immutable set of published CDs, keyed by CD name.
struct Catalog {
    std::string base_iri;
    std::set<std::string> link_predicates = {cd::kSeeAlso};
    std::map<std::string, cd::ContentDictionary> cds;
};

/// Reads every `*.ocd` file of `dir`. Throws on unreadable or invalid CDs.
Catalog load_directory(const std::filesystem::path& dir, std::string base_iri,
                       std::set<std::string> link_predicates = {cd::kSeeAlso});

struct Request {
    std::string method = "GET";
    std::string path;
    std::string accept;
};

struct Response {
    int status = 200;
    std::string content_type;
    std::map<std::string, std::string> headers;
    std::string body;
};

/// Picks the offered media type with the highest q-value in `accept`; ties
/// keep the order of `offered`. An empty header selects `offered.front()`.
/// Returns an empty string when nothing is acceptable.
std::string negotiate(std::string_view accept, const std::vector<std::string>& offered);

/// Request dispatch over a catalog:
///   /{cd}          -> CD XML (200), 303 to /{cd}.xhtml, or Turtle (200)
///   /{cd}.xhtml    -> HTML rendering
///   /{cd}/{name}   -> single-definition CD document
Response route(const Catalog& catalog, const Request& req,
               std::string_view default_representation = om::kMimeType);

/// Namespace of the local description vocabulary under `base`.
std::string vocabulary_namespace(std::string_view base);

/// HTML page with one section per symbol (`id` = symbol name) carrying
/// `about`/`property` annotations. `base` overrides the CD's own cdbase
/// for minted URIs.
std::string render_cd_html(const cd::ContentDictionary& cd, std::string_view base = {},
                           const std::set<std::string>& link_predicates = {cd::kSeeAlso});

/// RDF description: the CD resource, one resource per symbol with name,
/// description and containment triples, plus its typed links.
rdf::Graph cd_to_rdf(const cd::ContentDictionary& cd, const rdf::Iri& base,
                     const std::set<std::string>& link_predicates = {cd::kSeeAlso});

/// HTTP front end. Requests are served from an immutable catalog snapshot;
/// reload() swaps in a freshly read directory.
class CdServer {
public:
    explicit CdServer(ServerConfig config);
    ~CdServer();
    CdServer(const CdServer&) = delete;
    CdServer& operator=(const CdServer&) = delete;

    /// Binds and serves on a background thread. Returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();
    void reload();

    int port() const { return port_; }
    std::string base_iri() const;
    std::shared_ptr<const Catalog> snapshot() const;

private:
    int bind();

    ServerConfig config_;
    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::shared_ptr<const Catalog> catalog_;
    int port_ = 0;
};

}  // namespace omld::server
