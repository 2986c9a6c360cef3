#include <doctest.h>

#include "omld/config.hpp"
#include "support.hpp"

using namespace omld;
using namespace omld::config;

TEST_CASE("defaults are valid") {
    auto c = ToolkitConfig::defaults();
    CHECK_NOTHROW(c.validate());
    CHECK(c.tolerance == 1e-9);
    CHECK(c.max_depth == 32);
    CHECK(c.cache_ttl.count() == 300);
    CHECK(c.vocabulary().computed_from.str() == "http://example.org/ns/sl#computedFrom");
    CHECK(c.expand("env:Region") == "http://example.org/ns/env/Region");
    CHECK(c.expand("http://x.org/a") == "http://x.org/a");
}

TEST_CASE("shipped config file") {
    auto c = load(OMLD_CONFIG);
    CHECK(c.prefixes.at("scv") == "http://purl.org/NET/scovo#");
    CHECK(c.region_class == "http://example.org/ns/env/Region");
    CHECK(c.server.directory.filename() == "cds");
    CHECK(c.link_predicates.count(cd::kSeeAlso));
}

TEST_CASE("overrides and validation") {
    auto c = parse(R"({"tolerance": 0.5, "maxDepth": 4, "prefixes": {"ex": "http://ex.org/"},
                       "linkPredicates": ["ex:rel"], "cdDirs": ["cds"]})",
                   "/base");
    CHECK(c.tolerance == 0.5);
    CHECK(c.max_depth == 4);
    CHECK(c.link_predicates == std::set<std::string>{"http://ex.org/rel"});
    CHECK(c.cd_dirs[0] == std::filesystem::path("/base/cds"));

    CHECK_THROWS_AS(parse(R"({"tolerance": -1})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"prefixes": {"ex": "relative/iri"}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"maxDepth": "deep"})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"baseEnv": "transc1"})"), ConfigError);
    CHECK_THROWS_AS(parse("[1, 2"), ConfigError);
    CHECK_THROWS_AS(load("/no/such/file.json"), ConfigError);
}
