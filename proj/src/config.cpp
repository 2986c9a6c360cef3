#include "omld/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "omld/cd.hpp"
#include "omld/rdf.hpp"

namespace omld::config {

using nlohmann::json;

ToolkitConfig ToolkitConfig::defaults() {
    ToolkitConfig c;
    c.prefixes = {
        {"rdf", std::string(rdf::kRdfNs)},
        {"xsd", std::string(rdf::kXsdNs)},
        {"scv", "http://purl.org/NET/scovo#"},
        {"sl", "http://example.org/ns/sl#"},
        {"env", "http://example.org/ns/env/"},
        {"ahs", "http://example.org/ns/ahs/"},
        {"ahs2", "http://example.org/ns/ahs2/"},
    };
    c.link_predicates = {cd::kSeeAlso};
    c.region_class = "http://example.org/ns/env/Region";
    return c;
}

std::string ToolkitConfig::expand(const std::string& name) const {
    auto colon = name.find(':');
    if (colon != std::string::npos) {
        auto it = prefixes.find(name.substr(0, colon));
        if (it != prefixes.end() && name.compare(colon + 1, 2, "//") != 0) return it->second + name.substr(colon + 1);
    }
    return name;
}

void ToolkitConfig::validate() const {
    auto absolute = [](const std::string& what, const std::string& iri) {
        if (!rdf::has_scheme(iri)) throw ConfigError(what + " is not an absolute IRI: '" + iri + "'");
    };
    for (const auto& [p, iri] : prefixes) absolute("prefix " + p + ":", iri);
    for (const auto& p : link_predicates) absolute("link predicate", p);
    for (const auto& [from, to] : cd_locations) {
        absolute("CD location", from);
        absolute("CD mirror", to);
    }
    absolute("region class", region_class);
    if (!server.base_iri.empty()) absolute("server base IRI", server.base_iri);
    if (!(tolerance >= 0)) throw ConfigError("tolerance must be >= 0");
    if (max_depth < 1) throw ConfigError("maxDepth must be positive");
    if (cache_ttl.count() < 0) throw ConfigError("cacheTtl must be >= 0");
    if (base_env != "arith1") throw ConfigError("unknown base environment '" + base_env + "'");
    for (const char* p : {"rdf", "scv", "sl"})
        if (!prefixes.count(p)) throw ConfigError(std::string("prefix table lacks '") + p + ":'");
}

ToolkitConfig parse(const std::string& json_text, const std::filesystem::path& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    auto c = ToolkitConfig::defaults();
    auto rel = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !origin.empty() ? origin / path : path;
    };
    try {
        if (j.contains("prefixes"))
            for (auto& [k, v] : j["prefixes"].items()) c.prefixes[k] = v.get<std::string>();
        if (j.contains("baseEnv")) c.base_env = j["baseEnv"].get<std::string>();
        if (j.contains("maxDepth")) c.max_depth = j["maxDepth"].get<int>();
        if (j.contains("tolerance")) c.tolerance = j["tolerance"].get<double>();
        if (j.contains("cacheTtl")) c.cache_ttl = std::chrono::seconds(j["cacheTtl"].get<long long>());
        if (j.contains("linkPredicates")) {
            c.link_predicates.clear();
            for (auto& p : j["linkPredicates"]) c.link_predicates.insert(c.expand(p.get<std::string>()));
        }
        if (j.contains("cdLocations"))
            for (auto& [k, v] : j["cdLocations"].items()) c.cd_locations[k] = v.get<std::string>();
        if (j.contains("cdDirs"))
            for (auto& d : j["cdDirs"]) c.cd_dirs.push_back(rel(d.get<std::string>()));
        if (j.contains("regionClass")) c.region_class = c.expand(j["regionClass"].get<std::string>());
        if (j.contains("server")) {
            const auto& s = j["server"];
            if (s.contains("bind")) c.server.bind_address = s["bind"].get<std::string>();
            if (s.contains("port")) c.server.port = s["port"].get<int>();
            if (s.contains("dir")) c.server.directory = rel(s["dir"].get<std::string>());
            if (s.contains("baseIri")) c.server.base_iri = s["baseIri"].get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

ToolkitConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.parent_path());
}

}  // namespace omld::config
