#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "omld/annotations.hpp"
#include "omld/error.hpp"

namespace omld::config {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct ToolkitConfig {
    std::map<std::string, std::string> prefixes;
    std::string base_env = "arith1";
    int max_depth = ann::kDefaultMaxDepth;
    double tolerance = 1e-9;
    std::chrono::seconds cache_ttl{300};
    std::set<std::string> link_predicates;
    /// URL prefix -> mirror prefix, consulted before any CD request.
    std::map<std::string, std::string> cd_locations;
    /// Directories of `*.ocd` files preloaded into the CD store.
    std::vector<std::filesystem::path> cd_dirs;
    std::string region_class;

    struct Server {
        std::string bind_address = "127.0.0.1";
        int port = 8080;
        std::filesystem::path directory;
        std::string base_iri;
    } server;

    static ToolkitConfig defaults();

    ann::Vocabulary vocabulary() const { return ann::Vocabulary::from_prefixes(prefixes); }
    /// Expands `pfx:local`; absolute IRIs pass through.
    std::string expand(const std::string& name) const;
    void validate() const;
};

/// Defaults overlaid with the JSON document at `path`. Relative paths in
/// the file are taken relative to the file's directory.
ToolkitConfig load(const std::filesystem::path& path);
ToolkitConfig parse(const std::string& json_text, const std::filesystem::path& origin = {});

}  // namespace omld::config
