// omld: verify, recompute and query derived values in RDF statistics;
// expand and fetch OpenMath symbols; serve a directory of CDs.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "omld/annotations.hpp"
#include "omld/cd.hpp"
#include "omld/config.hpp"
#include "omld/om.hpp"
#include "omld/rdf.hpp"
#include "omld/resolver.hpp"
#include "omld/rewrite.hpp"
#include "omld/server.hpp"

namespace fs = std::filesystem;
using namespace omld;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kFailure = 2;
constexpr int kUsage = 64;

struct UsageError : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    if (!fs::exists(path) || fs::is_directory(path)) throw UsageError("no such file: " + path);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

rdf::Graph read_dataset(const std::string& path) {
    auto text = read_file(path);
    auto base = path == "-" ? std::string("file:///stdin") : "file://" + fs::absolute(path).lexically_normal().string();
    return rdf::parse_turtle(text, rdf::Iri(base));
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

struct Globals {
    std::string config_path;
    std::optional<double> tolerance;
    std::optional<int> max_depth;
    std::vector<std::string> cds;
    bool resolve = false;

    config::ToolkitConfig load() const {
        config::ToolkitConfig cfg;
        if (config_path.empty()) {
            cfg = config::ToolkitConfig::defaults();
        } else {
            if (!fs::is_regular_file(config_path)) throw UsageError("no such config file: " + config_path);
            cfg = config::load(config_path);
        }
        if (tolerance) cfg.tolerance = *tolerance;
        if (max_depth) cfg.max_depth = *max_depth;
        cfg.validate();
        return cfg;
    }
};

struct Toolkit {
    config::ToolkitConfig cfg;
    std::shared_ptr<resolver::Resolver> resolver;
    std::unique_ptr<rewrite::CdStore> store;
    rewrite::BaseEnv base = rewrite::BaseEnv::arith1();

    Toolkit(const Globals& g) : cfg(g.load()) {
        resolver::ResolverOptions ropts;
        ropts.ttl = cfg.cache_ttl;
        ropts.rewrites = cfg.cd_locations;
        resolver = std::make_shared<resolver::Resolver>(std::make_shared<resolver::HttplibTransport>(), ropts);
        store = std::make_unique<rewrite::CdStore>(g.resolve ? resolver->store_hook() : rewrite::CdStore::FetchHook{});

        auto dirs = cfg.cd_dirs;
        for (const auto& loc : g.cds) {
            if (rdf::has_scheme(loc) && !fs::exists(loc)) {
                store->add(*resolver->fetch_cd(rdf::Iri(loc)));
                continue;
            }
            dirs.emplace_back(loc);
        }
        for (const auto& dir : dirs) {
            if (fs::is_regular_file(dir)) {
                store->add(cd::parse_cd_xml(read_file(dir.string())));
                continue;
            }
            if (!fs::is_directory(dir)) throw UsageError("no such CD file or directory: " + dir.string());
            for (auto& [name, cd] : server::load_directory(dir, "").cds) store->add(cd);
        }
    }

    rewrite::PipelineOptions pipeline() const { return {cfg.vocabulary(), cfg.max_depth, warn}; }
};

int cmd_verify(const Globals& g, const std::string& dataset, const std::string& report_json) {
    Toolkit tk(g);
    auto graph = read_dataset(dataset);
    auto report = rewrite::verify_dataset(graph, *tk.store, tk.base, tk.cfg.tolerance, tk.pipeline());
    std::cout << report.to_text();
    if (!report_json.empty()) write_output(report_json, report.to_json() + "\n");
    if (report.count(rewrite::Status::Uncomputable)) return kFailure;
    if (report.count(rewrite::Status::Mismatch)) return kMismatch;
    return kOk;
}

int cmd_recompute(const Globals& g, const std::string& dataset, const std::string& out) {
    Toolkit tk(g);
    auto graph = read_dataset(dataset);
    auto result = rewrite::recompute(graph, *tk.store, tk.base, tk.pipeline());
    write_output(out, rdf::serialize_turtle(result));
    return kOk;
}

int cmd_expand(const Globals& g, const std::string& input, const std::string& out) {
    Toolkit tk(g);
    auto obj = om::parse_om_xml(read_file(input));
    auto result = rewrite::expand(obj, *tk.store, tk.base, tk.cfg.max_depth, warn);
    write_output(out, om::serialize_om_xml(result.term, true) + "\n");
    for (const auto& uri : result.residual) std::cerr << "residual: " << uri << "\n";
    return kOk;
}

int cmd_fetch(const Globals& g, const std::string& uri, const std::string& accept, const std::string& out) {
    g.load();
    resolver::HttplibTransport transport;
    std::vector<std::string> types{accept};
    auto res = resolver::negotiate_fetch(transport, rdf::Iri(uri), types);
    for (const auto& hop : res.redirect_chain) std::cerr << "redirect: " << hop.str() << "\n";
    std::cerr << "content-type: " << res.content_type << "\n";
    write_output(out, res.body);
    return kOk;
}

std::atomic<int> pending_signal{0};

extern "C" void on_signal(int sig) { pending_signal = sig; }

int cmd_serve(const Globals& g, std::optional<int> port, const std::string& dir, const std::string& base_iri) {
    auto cfg = g.load();
    server::ServerConfig sc;
    sc.bind_address = cfg.server.bind_address;
    sc.port = port.value_or(cfg.server.port);
    sc.cd_directory = dir.empty() ? cfg.server.directory : fs::path(dir);
    sc.base_iri = base_iri.empty() ? cfg.server.base_iri : base_iri;
    sc.link_predicates = cfg.link_predicates;
    if (sc.cd_directory.empty() || !fs::is_directory(sc.cd_directory))
        throw UsageError("CD directory does not exist: " + sc.cd_directory.string());
    if (!sc.base_iri.empty() && !rdf::has_scheme(sc.base_iri))
        throw UsageError("base IRI is not absolute: " + sc.base_iri);

    server::CdServer srv(sc);
    std::signal(SIGHUP, on_signal);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    int bound = srv.start();
    std::cerr << "serving " << sc.cd_directory.string() << " on " << sc.bind_address << ":" << bound << " as "
              << srv.base_iri() << "\n";
    while (true) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        int sig = pending_signal.exchange(0);
        if (sig == SIGHUP) {
            try {
                srv.reload();
                std::cerr << "reloaded " << srv.snapshot()->cds.size() << " CD(s)\n";
            } catch (const std::exception& e) {
                std::cerr << "reload failed, keeping previous CDs: " << e.what() << "\n";
            }
        } else if (sig == SIGINT || sig == SIGTERM) {
            break;
        }
    }
    srv.stop();
    return kOk;
}

int cmd_query_max(const Globals& g, const std::string& dataset, const std::string& metric, const std::string& t1,
                  const std::string& t2, const std::string& region_class) {
    Toolkit tk(g);
    auto graph = read_dataset(dataset);
    auto iri = [&](const std::string& s) {
        auto full = tk.cfg.expand(s);
        if (!rdf::has_scheme(full)) throw UsageError("not an IRI: " + s);
        return rdf::Iri(full);
    };
    auto result = rewrite::query_max_increase(graph, iri(metric),
                                              iri(region_class.empty() ? tk.cfg.region_class : region_class), iri(t1),
                                              iri(t2), *tk.store, tk.base, tk.pipeline());
    std::cout << result.region.str() << " " << Decimal::from_double(result.increase).to_string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linked-data toolkit for OpenMath content dictionaries and derived statistics"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config_path, "JSON configuration file");
    app.add_option("--tolerance", g.tolerance, "relative tolerance for verify")->check(CLI::NonNegativeNumber);
    app.add_option("--max-depth", g.max_depth, "expansion depth limit")->check(CLI::PositiveNumber);
    app.add_option("--cd", g.cds, "CD file, directory of *.ocd files, or CD URL (repeatable)");
    app.add_flag("--resolve", g.resolve, "dereference CDs missing locally at their cdbase");

    std::string dataset, out, report_json, input, uri, dir, base_iri, metric, t1, t2, region_class;
    std::string accept(om::kMimeType);
    std::optional<int> port;

    auto* verify = app.add_subcommand("verify", "check stored derived values against their derivations");
    verify->add_option("dataset", dataset, "Turtle dataset")->required();
    verify->add_option("--report-json", report_json, "also write the report as JSON");

    auto* recompute = app.add_subcommand("recompute", "recompute every derived value");
    recompute->add_option("dataset", dataset, "Turtle dataset")->required();
    recompute->add_option("--out", out, "output Turtle file (default stdout)");

    auto* expand = app.add_subcommand("expand", "unfold symbol definitions down to arith1");
    expand->add_option("input", input, "OpenMath XML file, - for stdin")->required();
    expand->add_option("--out", out, "output file (default stdout)");

    auto* fetch = app.add_subcommand("fetch", "dereference a URI with content negotiation");
    fetch->add_option("uri", uri, "symbol or CD URI")->required();
    fetch->add_option("--accept", accept, "preferred media type");
    fetch->add_option("--out", out, "output file (default stdout)");

    auto* serve = app.add_subcommand("serve", "publish a directory of CDs over HTTP");
    serve->add_option("--port", port, "TCP port, 0 for any")->check(CLI::Range(0, 65535));
    serve->add_option("--dir", dir, "directory of *.ocd files");
    serve->add_option("--base-iri", base_iri, "base for minted URIs");

    auto* query = app.add_subcommand("query-max", "region with the largest metric increase between two times");
    query->add_option("dataset", dataset, "Turtle dataset")->required();
    query->add_option("--metric", metric, "function IRI of the metric")->required();
    query->add_option("--t1", t1, "earlier time dimension")->required();
    query->add_option("--t2", t2, "later time dimension")->required();
    query->add_option("--region-class", region_class, "rdf:type of region dimensions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*verify) return cmd_verify(g, dataset, report_json);
        if (*recompute) return cmd_recompute(g, dataset, out);
        if (*expand) return cmd_expand(g, input, out);
        if (*fetch) return cmd_fetch(g, uri, accept, out);
        if (*serve) return cmd_serve(g, port, dir, base_iri);
        if (*query) return cmd_query_max(g, dataset, metric, t1, t2, region_class);
    } catch (const UsageError& e) {
        std::cerr << "omld: " << e.what() << "\n";
        return kUsage;
    } catch (const config::ConfigError& e) {
        std::cerr << "omld: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "omld: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}
