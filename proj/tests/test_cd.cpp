#include <doctest.h>

#include <vector>

#include "omld/cd.hpp"
#include "support.hpp"

using namespace omld;
using namespace omld::cd;
using testing::fixture;
using testing::slurp;

namespace {

ContentDictionary statistics() { return parse_cd_xml(slurp(fixture("cds/statistics.ocd"))); }

}  // namespace

TEST_CASE("statistics CD header and definitions") {
    auto cd = statistics();
    CHECK(cd.cdname == "statistics");
    CHECK(cd.cdbase == "http://example.org/cd");
    CHECK(cd.description == "Derived indicators used in official statistics.");
    REQUIRE(cd.definitions.size() == 3);
    const auto* hdi = cd.find("hdi");
    REQUIRE(hdi);
    CHECK(hdi->cmps == std::vector<std::string>{"hdi(LE, ALI, GEI, GDP) = 1/3 (LE + 2/3 ALI + 1/3 GEI + GDP)"});
    CHECK(hdi->fmps.size() == 2);
    CHECK(cd.find("nope") == nullptr);
}

TEST_CASE("own symbols inside FMPs take the CD's cdbase") {
    auto cd = statistics();
    auto* eq = cd.find("density")->fmps[0].as<om::Application>();
    auto* lhs = eq->args[0].as<om::Application>();
    CHECK(*lhs->head.as<om::Symbol>() == om::Symbol{"http://example.org/cd", "statistics", "density"});
    CHECK(eq->head.as<om::Symbol>()->cdbase == om::kDefaultCdBase);
}

TEST_CASE("definitional FMP lookup") {
    auto cd = statistics();
    auto hdi = find_definition(cd, "hdi");
    REQUIRE(std::holds_alternative<DefinitionalFmp>(hdi));
    const auto& def = std::get<DefinitionalFmp>(hdi);
    CHECK(def.arity() == 4);
    CHECK(def.params[1].name == "ALI");
    CHECK(std::holds_alternative<NoSuchSymbol>(find_definition(cd, "missing")));

    auto constants = parse_cd_xml(slurp(fixture("cds_extra/constants.ocd")));
    auto tau = find_definition(constants, "tau");
    REQUIRE(std::holds_alternative<DefinitionalFmp>(tau));
    CHECK(std::get<DefinitionalFmp>(tau).arity() == 0);
}

TEST_CASE("FMPs that are not definitions") {
    auto text = R"(<CD><CDName>c</CDName>
      <CDDefinition><Name>f</Name>
        <FMP><OMOBJ><OMA><OMS cd="relation1" name="eq"/>
          <OMA><OMS cd="c" name="f"/><OMV name="x"/><OMV name="x"/></OMA><OMV name="x"/></OMA></OMOBJ></FMP>
        <FMP><OMOBJ><OMA><OMS cd="relation1" name="eq"/>
          <OMA><OMS cd="c" name="f"/><OMV name="x"/></OMA><OMV name="y"/></OMA></OMOBJ></FMP>
        <FMP><OMOBJ><OMA><OMS cd="relation1" name="lt"/>
          <OMA><OMS cd="c" name="f"/><OMV name="x"/></OMA><OMI>1</OMI></OMA></OMOBJ></FMP>
      </CDDefinition>
      <CDDefinition><Name>g</Name></CDDefinition></CD>)";
    auto cd = parse_cd_xml(text);
    CHECK(std::holds_alternative<NotDefinitional>(find_definition(cd, "f")));
    CHECK(std::holds_alternative<NotDefinitional>(find_definition(cd, "g")));
}

TEST_CASE("later definitions are reported and ignored") {
    auto text = R"(<CD><CDName>c</CDName><CDDefinition><Name>k</Name>
        <FMP><OMOBJ><OMA><OMS cd="relation1" name="eq"/><OMS cd="c" name="k"/><OMI>1</OMI></OMA></OMOBJ></FMP>
        <FMP><OMOBJ><OMA><OMS cd="relation1" name="eq"/><OMS cd="c" name="k"/><OMI>2</OMI></OMA></OMOBJ></FMP>
      </CDDefinition></CD>)";
    std::vector<std::string> warnings;
    auto def = find_definition(parse_cd_xml(text), "k", [&](const std::string& w) { warnings.push_back(w); });
    CHECK(std::get<DefinitionalFmp>(def).body == om::integer(1));
    CHECK(warnings.size() == 1);
}

TEST_CASE("malformed CDs") {
    CHECK_THROWS_AS(parse_cd_xml("<CD><CDDefinition><Name>a</Name></CDDefinition></CD>"), MissingElement);
    CHECK_THROWS_AS(parse_cd_xml("<CD><CDName>c</CDName><CDDefinition></CDDefinition></CD>"), MissingElement);
    CHECK_THROWS_AS(parse_cd_xml("<CD><CDName>c</CDName><CDDefinition><Name>a</Name></CDDefinition>"
                                 "<CDDefinition><Name>a</Name></CDDefinition></CD>"),
                    DuplicateSymbol);
    CHECK_THROWS_AS(parse_cd_xml("<NotCD/>"), MissingElement);
    CHECK_THROWS(parse_cd_xml("<CD><CDName>c</CDName>"));
    auto cd = parse_cd_xml("<CD><CDName>c</CDName><CDVersion>4</CDVersion><CDDefinition><Name>a</Name>"
                           "<Role>application</Role><Example>text</Example></CDDefinition></CD>");
    CHECK(cd.cdbase == om::kDefaultCdBase);
    CHECK(cd.definitions.size() == 1);
}

TEST_CASE("serialization round trips") {
    for (const char* f : {"cds/statistics.ocd", "cds_extra/chain.ocd", "cds_extra/constants.ocd"}) {
        auto cd = parse_cd_xml(slurp(fixture(f)));
        auto text = serialize_cd_xml(cd);
        CHECK(parse_cd_xml(text) == cd);
        CHECK(serialize_cd_xml(parse_cd_xml(text)) == text);
    }
    auto cd = statistics();
    auto single = parse_cd_xml(serialize_single_definition(cd, *cd.find("density")));
    CHECK(single.cdname == "statistics");
    CHECK(single.cdbase == cd.cdbase);
    REQUIRE(single.definitions.size() == 1);
    CHECK(single.definitions[0] == *cd.find("density"));
}

TEST_CASE("typed links") {
    auto links = extract_links(statistics());
    REQUIRE(links.size() == 2);
    CHECK(links[0].subject.str() == "http://example.org/cd/statistics#hdi");
    CHECK(links[0].predicate.str() == kSeeAlso);
    CHECK(links[0].object.str() == "http://dbpedia.org/resource/Human_Development_Index");
    CHECK(links[1].subject.str() == "http://www.openmath.org/cd/transc1#ln");
    CHECK(links[1].object.str() == "http://dbpedia.org/resource/Natural_logarithm");
    CHECK(extract_links(statistics(), {"http://example.org/other#rel"}).empty());
}
