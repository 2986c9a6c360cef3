#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "omld/annotations.hpp"
#include "omld/config.hpp"
#include "omld/rdf.hpp"
#include "omld/rewrite.hpp"
#include "omld/server.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(OMLD_FIXTURES) / name; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline omld::rdf::Graph load_ttl(const std::string& name) {
    return omld::rdf::parse_turtle(slurp(fixture(name)), omld::rdf::Iri("file:///fixtures/" + name));
}

inline omld::ann::Vocabulary vocab() { return omld::config::ToolkitConfig::defaults().vocabulary(); }

inline omld::rdf::Iri ahs(const std::string& local) { return omld::rdf::Iri("http://example.org/ns/ahs/" + local); }
inline omld::rdf::Iri env(const std::string& local) { return omld::rdf::Iri("http://example.org/ns/env/" + local); }

/// A store preloaded with the CDs of the given fixture directories.
inline std::unique_ptr<omld::rewrite::CdStore> store_with(std::initializer_list<const char*> dirs) {
    auto store = std::make_unique<omld::rewrite::CdStore>();
    for (auto d : dirs)
        for (auto& [name, cd] : omld::server::load_directory(fixture(d), "").cds) store->add(cd);
    return store;
}

inline omld::rewrite::PipelineOptions pipeline() { return {vocab(), 32, {}}; }

}  // namespace testing
