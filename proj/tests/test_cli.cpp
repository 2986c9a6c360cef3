#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "omld/resolver.hpp"
#include "omld/server.hpp"
#include "support.hpp"

using namespace omld;
using testing::fixture;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run omld_cli(const std::string& args) {
    auto err_file = std::filesystem::temp_directory_path() / ("omld-cli-" + std::to_string(::getpid()) + ".err");
    std::string cmd = std::string(OMLD_BINARY) + " " + args + " 2>" + err_file.string();
    Run r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = testing::slurp(err_file);
    std::filesystem::remove(err_file);
    return r;
}

std::string f(const char* name) { return fixture(name).string(); }

}  // namespace

TEST_CASE("verify exit codes") {
    auto ok = omld_cli("verify " + f("listing2.ttl"));
    CHECK(ok.code == 0);
    CHECK(ok.out.rfind("MATCH http://example.org/ns/ahs/PD100", 0) == 0);

    auto bad = omld_cli("verify " + f("tampered.ttl"));
    CHECK(bad.code == 1);
    CHECK(bad.out.find("MISMATCH") != std::string::npos);

    CHECK(omld_cli("--tolerance 0.1 verify " + f("tampered.ttl")).code == 0);
    CHECK(omld_cli("--config /no/such.json verify " + f("listing2.ttl")).code == 64);
    CHECK(omld_cli("verify /no/such.ttl").code == 64);
    CHECK(omld_cli("verify").code == 64);
    CHECK(omld_cli("frobnicate").code == 64);
    CHECK(omld_cli("--config " + std::string(OMLD_CONFIG) + " verify " + f("listing2.ttl")).code == 0);
}

TEST_CASE("verify writes a JSON report") {
    auto path = std::filesystem::temp_directory_path() / "omld-report.json";
    CHECK(omld_cli("verify " + f("tampered.ttl") + " --report-json " + path.string()).code == 1);
    auto json = testing::slurp(path);
    CHECK(json.find("\"MISMATCH\"") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("recompute") {
    auto edited = std::filesystem::temp_directory_path() / "omld-edited.ttl";
    auto text = testing::slurp(fixture("listing2.ttl"));
    text.replace(text.find("\"693\""), 5, "\"700\"");
    std::ofstream(edited) << text;
    auto out = std::filesystem::temp_directory_path() / "omld-out.ttl";
    CHECK(omld_cli("recompute " + edited.string() + " --out " + out.string()).code == 0);
    auto g = rdf::parse_turtle(testing::slurp(out), rdf::Iri("http://example.org/t"));
    auto v = g.object(testing::ahs("PD100"), rdf::Iri(std::string(rdf::kRdfNs) + "value"));
    REQUIRE(v);
    CHECK(*Decimal::parse(std::get<rdf::Literal>(*v).lexical) == Decimal::from_double(700.0 / 380.0));
    CHECK(omld_cli("verify " + out.string()).code == 0);
    std::filesystem::remove(edited);
    std::filesystem::remove(out);

    auto cyclic = omld_cli("recompute " + f("cyclic.ttl"));
    CHECK(cyclic.code == 2);
    CHECK(cyclic.err.find("cyclic derivation") != std::string::npos);
}

TEST_CASE("expand") {
    auto r = omld_cli("--cd " + f("cds") + " expand " + f("hdi_application.xml"));
    CHECK(r.code == 0);
    auto obj = om::parse_om_xml(r.out);
    CHECK(r.out.find("statistics") == std::string::npos);
    CHECK(r.out.find("cd=\"arith1\"") != std::string::npos);
    CHECK(obj.is<om::Application>());

    auto residual = omld_cli("--cd " + f("cds") + " expand " + f("residual.xml"));
    CHECK(residual.code == 0);
    CHECK(residual.out.find("name=\"sin\"") != std::string::npos);
    CHECK(residual.err.find("residual: http://www.openmath.org/cd/transc1#sin") != std::string::npos);

    auto base = std::filesystem::temp_directory_path() / "omld-base.xml";
    std::ofstream(base) << om::serialize_om_xml(om::apply(om::sym("arith1", "plus"), {om::integer(1), om::integer(2)}), true);
    auto same = omld_cli("expand " + base.string());
    CHECK(om::parse_om_xml(same.out) == om::parse_om_xml(testing::slurp(base)));
    std::filesystem::remove(base);
}

TEST_CASE("query-max") {
    auto r = omld_cli("--cd " + f("cds") + " query-max " + f("regions.ttl") +
                      " --metric http://example.org/cd/statistics#density --t1 env:year-2008 --t2 env:year-2009");
    CHECK(r.code == 0);
    CHECK(r.out == "http://example.org/ns/env/region-3 8\n");
}

TEST_CASE("fetch and serve") {
    server::ServerConfig config;
    config.port = 0;
    config.cd_directory = fixture("cds");
    server::CdServer srv(config);
    srv.start();
    auto base = srv.base_iri();

    auto xml = omld_cli("fetch '" + base + "/statistics#hdi'");
    CHECK(xml.code == 0);
    CHECK(cd::parse_cd_xml(xml.out).cdname == "statistics");

    auto html = omld_cli("fetch --accept text/html '" + base + "/statistics'");
    CHECK(html.code == 0);
    CHECK(html.err.find("redirect: " + base + "/statistics.xhtml") != std::string::npos);
    CHECK(html.out.find("id=\"hdi\"") != std::string::npos);
    srv.stop();

    CHECK(omld_cli("fetch http://nonexistent.invalid/cd").code == 2);
    CHECK(omld_cli("serve --dir /no/such/dir").code == 64);
}

TEST_CASE("serve reloads on SIGHUP") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / ("omld-serve-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    fs::copy_file(fixture("cds/statistics.ocd"), dir / "statistics.ocd", fs::copy_options::overwrite_existing);
    auto log = dir / "serve.log";
    auto pidfile = dir / "pid";
    std::string cmd = std::string(OMLD_BINARY) + " serve --port 0 --dir " + dir.string() + " 2>" + log.string() +
                      " & echo $! > " + pidfile.string();
    REQUIRE(std::system(cmd.c_str()) == 0);

    auto wait_for = [&](const std::string& needle) {
        for (int i = 0; i < 100; ++i) {
            auto text = testing::slurp(log);
            if (text.find(needle) != std::string::npos) return text;
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        return std::string();
    };
    auto banner = wait_for(" as http://");
    REQUIRE(!banner.empty());
    auto base = banner.substr(banner.find(" as ") + 4);
    base = base.substr(0, base.find('\n'));
    std::string pid = testing::slurp(pidfile);
    pid = pid.substr(0, pid.find('\n'));

    resolver::HttplibTransport http;
    CHECK(http.get(base + "/chain", std::string(om::kMimeType)).status == 404);
    fs::copy_file(fixture("cds_extra/chain.ocd"), dir / "chain.ocd");
    REQUIRE(std::system(("kill -HUP " + pid).c_str()) == 0);
    CHECK(!wait_for("reloaded 2 CD(s)").empty());
    CHECK(http.get(base + "/chain", std::string(om::kMimeType)).status == 200);

    CHECK(std::system(("kill -TERM " + pid).c_str()) == 0);
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    fs::remove_all(dir);
}
