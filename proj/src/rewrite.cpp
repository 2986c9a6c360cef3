#include "omld/rewrite.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <sstream>

#include <json.hpp>

namespace omld::rewrite {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : sep) + p;
    return out;
}

std::string uri_of(const om::Symbol& s) { return om::symbol_iri(s).str(); }

}  // namespace

DepthExceeded::DepthExceeded(std::vector<std::string> chain, int limit)
    : Error("expansion deeper than " + std::to_string(limit) + ": " + join(chain, " -> ")), chain_(std::move(chain)) {}

ArityMismatch::ArityMismatch(const std::string& symbol, std::size_t expected, std::size_t got)
    : Error(symbol + " is defined with " + std::to_string(expected) + " argument(s) but applied to " +
            std::to_string(got)) {}

// ---------------------------------------------------------------------------
// CdStore

bool CdStore::add(cd::ContentDictionary cd) {
    Key key{cd.cdbase, cd.cdname};
    std::unique_lock lock(mutex_);
    misses_.erase(key);
    return cds_.try_emplace(std::move(key), std::make_shared<const cd::ContentDictionary>(std::move(cd))).second;
}

std::shared_ptr<const cd::ContentDictionary> CdStore::get(const std::string& cdbase, const std::string& cdname) {
    Key key{cdbase, cdname};
    {
        std::shared_lock lock(mutex_);
        if (auto it = cds_.find(key); it != cds_.end()) return it->second;
        if (misses_.count(key) || !hook_) return nullptr;
    }
    auto fetched = hook_(cdbase, cdname);
    std::unique_lock lock(mutex_);
    if (!fetched) {
        misses_.insert(key);
        return nullptr;
    }
    auto cd = std::make_shared<const cd::ContentDictionary>(std::move(*fetched));
    // A fetched document may declare a different base than the one asked
    // for (mirrors); it is reachable under both keys.
    auto own = cds_.try_emplace(Key{cd->cdbase, cd->cdname}, cd).first->second;
    return cds_.try_emplace(key, own).first->second;
}

cd::DefinitionLookup CdStore::definition(const om::Symbol& s, const cd::WarningSink& warn) {
    auto cd = get(s.cdbase, s.cd);
    if (!cd) return cd::NoSuchSymbol{};
    // Definitions are matched against the CD's own symbol identity.
    om::Symbol own = cd->symbol(s.name);
    auto result = cd::find_definition(*cd, s.name, warn);
    if (auto* def = std::get_if<cd::DefinitionalFmp>(&result); def && own != s) def->symbol = s;
    return result;
}

std::size_t CdStore::size() const {
    std::shared_lock lock(mutex_);
    return cds_.size();
}

// ---------------------------------------------------------------------------
// BaseEnv

const BaseOp* BaseEnv::find(const om::Symbol& s) const {
    auto it = ops_.find(s);
    return it == ops_.end() ? nullptr : &it->second;
}

BaseEnv BaseEnv::arith1() {
    auto a1 = [](const char* name) { return om::Symbol{std::string(om::kDefaultCdBase), "arith1", name}; };
    constexpr std::size_t kMany = SIZE_MAX;
    BaseEnv env;
    env.add(a1("plus"), {1, kMany, [](std::span<const double> x) {
                             double sum = 0;
                             for (double v : x) sum += v;
                             return sum;
                         }});
    env.add(a1("times"), {1, kMany, [](std::span<const double> x) {
                              double prod = 1;
                              for (double v : x) prod *= v;
                              return prod;
                          }});
    env.add(a1("minus"), {2, 2, [](std::span<const double> x) { return x[0] - x[1]; }});
    env.add(a1("divide"), {2, 2, [](std::span<const double> x) {
                               if (x[1] == 0) throw DivisionByZero("");
                               return x[0] / x[1];
                           }});
    env.add(a1("power"), {2, 2, [](std::span<const double> x) {
                              if (x[0] == 0 && x[1] < 0) throw DivisionByZero("");
                              double r = std::pow(x[0], x[1]);
                              if (std::isnan(r)) throw EvaluationError("power has no real value");
                              return r;
                          }});
    env.add(a1("unary_minus"), {1, 1, [](std::span<const double> x) { return -x[0]; }});
    env.add(a1("abs"), {1, 1, [](std::span<const double> x) { return std::fabs(x[0]); }});
    return env;
}

// ---------------------------------------------------------------------------
// substitute

namespace {

using Env = std::map<std::string, om::Object>;

std::string fresh_name(const std::string& stem, const std::set<std::string>& avoid) {
    for (int i = 1;; ++i) {
        std::string candidate = stem + "_" + std::to_string(i);
        if (!avoid.count(candidate)) return candidate;
    }
}

om::Object subst(const om::Object& obj, const Env& env, const std::set<std::string>& bound) {
    if (auto* v = obj.as<om::Variable>()) {
        if (bound.count(v->name)) return obj;
        auto it = env.find(v->name);
        if (it == env.end()) throw UnboundVariable(v->name);
        return it->second;
    }
    if (auto* a = obj.as<om::Application>()) {
        std::vector<om::Object> args;
        args.reserve(a->args.size());
        for (const auto& arg : a->args) args.push_back(subst(arg, env, bound));
        return om::apply(subst(a->head, env, bound), std::move(args));
    }
    if (auto* b = obj.as<om::Binding>()) {
        Env inner = env;
        for (const auto& v : b->vars) inner.erase(v.name);

        std::set<std::string> value_vars;
        for (const auto& [name, value] : inner)
            for (const auto& fv : om::free_variables(value)) value_vars.insert(fv);

        std::set<std::string> avoid = value_vars;
        for (const auto& fv : om::free_variables(b->body)) avoid.insert(fv);
        for (const auto& [name, value] : inner) avoid.insert(name);
        for (const auto& v : b->vars) avoid.insert(v.name);
        for (const auto& n : bound) avoid.insert(n);

        std::set<std::string> inner_bound = bound;
        std::vector<om::Variable> vars;
        for (const auto& v : b->vars) {
            if (value_vars.count(v.name)) {
                auto renamed = fresh_name(v.name, avoid);
                avoid.insert(renamed);
                inner_bound.erase(v.name);
                inner.insert_or_assign(v.name, om::variable(renamed));
                vars.push_back(om::Variable{renamed});
            } else {
                inner_bound.insert(v.name);
                vars.push_back(v);
            }
        }
        return om::bind(subst(b->binder, env, bound), std::move(vars), subst(b->body, inner, inner_bound));
    }
    return obj;
}

}  // namespace

om::Object substitute(const om::Object& body, const std::map<std::string, om::Object>& bindings) {
    return subst(body, bindings, {});
}

// ---------------------------------------------------------------------------
// expand

namespace {

class Expander {
public:
    Expander(CdStore& store, const BaseEnv& base, int max_depth, const cd::WarningSink& warn)
        : store_(store), base_(base), max_depth_(max_depth), warn_(warn) {}

    om::Object run(const om::Object& obj) {
        if (auto* s = obj.as<om::Symbol>()) return symbol(obj, *s);
        if (auto* a = obj.as<om::Application>()) return application(*a);
        if (auto* b = obj.as<om::Binding>()) return om::bind(run(b->binder), b->vars, run(b->body));
        return obj;
    }

    std::set<std::string> residual;

private:
    om::Object unfold(const std::string& uri, const om::Object& replacement) {
        chain_.push_back(uri);
        if (static_cast<int>(chain_.size()) > max_depth_) throw DepthExceeded(chain_, max_depth_);
        auto out = run(replacement);
        chain_.pop_back();
        return out;
    }

    om::Object symbol(const om::Object& obj, const om::Symbol& s) {
        if (base_.contains(s)) return obj;
        auto def = store_.definition(s, warn_);
        if (auto* d = std::get_if<cd::DefinitionalFmp>(&def); d && d->arity() == 0)
            return unfold(uri_of(s), d->body);
        residual.insert(uri_of(s));
        return obj;
    }

    om::Object application(const om::Application& a) {
        std::vector<om::Object> args;
        args.reserve(a.args.size());
        for (const auto& arg : a.args) args.push_back(run(arg));

        auto* s = a.head.as<om::Symbol>();
        if (!s) return om::apply(run(a.head), std::move(args));
        if (base_.contains(*s)) return om::apply(a.head, std::move(args));

        auto def = store_.definition(*s, warn_);
        auto* d = std::get_if<cd::DefinitionalFmp>(&def);
        if (!d) {
            residual.insert(uri_of(*s));
            return om::apply(a.head, std::move(args));
        }
        if (d->arity() != args.size()) throw ArityMismatch(uri_of(*s), d->arity(), args.size());
        std::map<std::string, om::Object> bindings;
        for (std::size_t i = 0; i < args.size(); ++i) bindings.emplace(d->params[i].name, args[i]);
        return unfold(uri_of(*s), substitute(d->body, bindings));
    }

    CdStore& store_;
    const BaseEnv& base_;
    int max_depth_;
    const cd::WarningSink& warn_;
    std::vector<std::string> chain_;
};

}  // namespace

ExpandResult expand(const om::Object& obj, CdStore& store, const BaseEnv& base, int max_depth,
                    const cd::WarningSink& warn) {
    if (max_depth < 1) throw Error("max depth must be at least 1");
    Expander ex(store, base, max_depth, warn);
    auto term = ex.run(obj);
    return ExpandResult{std::move(term), std::move(ex.residual)};
}

// ---------------------------------------------------------------------------
// evaluate

double evaluate(const om::Object& obj, const BaseEnv& base) {
    if (auto* i = obj.as<om::Integer>()) return i->value.convert_to<double>();
    if (auto* f = obj.as<om::Float>()) return f->value;
    if (auto* v = obj.as<om::Variable>()) throw FreeVariable(v->name);
    if (auto* s = obj.as<om::Symbol>()) {
        if (base.contains(*s)) throw NonNumericLeaf(uri_of(*s));
        throw UnknownSymbol(uri_of(*s));
    }
    if (auto* a = obj.as<om::Application>()) {
        auto* s = a->head.as<om::Symbol>();
        if (!s) throw NonNumericLeaf("application head " + om::to_text(a->head));
        const BaseOp* op = base.find(*s);
        if (!op) throw UnknownSymbol(uri_of(*s));
        if (a->args.size() < op->min_args || a->args.size() > op->max_args)
            throw EvaluationError(uri_of(*s) + " applied to " + std::to_string(a->args.size()) + " argument(s)");
        std::vector<double> values;
        values.reserve(a->args.size());
        for (const auto& arg : a->args) values.push_back(evaluate(arg, base));
        try {
            return op->fn(values);
        } catch (const DivisionByZero& e) {
            if (!e.location().empty()) throw;
            throw DivisionByZero(om::to_text(obj));
        }
    }
    throw NonNumericLeaf(om::to_text(obj));
}

// ---------------------------------------------------------------------------
// dataset pipeline

double compute_derivation(const ann::Derivation& d, const ann::Dataset& data, CdStore& store, const BaseEnv& base,
                          const PipelineOptions& opts) {
    auto obj = ann::derivation_to_om(d, data, opts.max_depth);
    auto expanded = expand(obj, store, base, opts.max_depth, opts.warn);
    if (!expanded.residual.empty()) {
        std::vector<std::string> names(expanded.residual.begin(), expanded.residual.end());
        throw EvaluationError("no definition for " + join(names, ", "));
    }
    return evaluate(expanded.term, base);
}

std::size_t VerificationReport::count(Status s) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [s](const VerificationEntry& e) { return e.status == s; }));
}

namespace {

const char* status_name(Status s) {
    switch (s) {
        case Status::Match: return "MATCH";
        case Status::Mismatch: return "MISMATCH";
        case Status::Uncomputable: return "UNCOMPUTABLE";
    }
    return "?";
}

std::string num(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string VerificationReport::to_text() const {
    std::string out;
    for (const auto& e : entries) {
        out += std::string(status_name(e.status)) + " " + e.point.str();
        if (e.stored) out += " stored=" + num(*e.stored);
        if (e.computed) out += " computed=" + num(*e.computed);
        if (e.delta) out += " delta=" + num(*e.delta);
        if (!e.reason.empty()) out += " reason=\"" + e.reason + "\"";
        out += "\n";
    }
    return out;
}

std::string VerificationReport::to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
        arr.push_back({{"id", e.point.str()},
                       {"status", status_name(e.status)},
                       {"stored", opt(e.stored)},
                       {"computed", opt(e.computed)},
                       {"delta", opt(e.delta)},
                       {"reason", e.reason}});
    }
    return arr.dump(2);
}

VerificationReport verify_dataset(const rdf::Graph& g, CdStore& store, const BaseEnv& base, double tolerance,
                                  const PipelineOptions& opts) {
    if (tolerance < 0) throw Error("tolerance must be non-negative");
    ann::Dataset data(g, opts.vocab, opts.warn);
    VerificationReport report;
    for (const auto& [id, d] : data.derivations()) {
        VerificationEntry entry;
        entry.point = id;
        const auto* p = data.point(id);
        if (!p || !p->value) {
            entry.reason = "no stored value";
            report.entries.push_back(std::move(entry));
            continue;
        }
        entry.stored = p->value->to_double();
        try {
            entry.computed = compute_derivation(d, data, store, base, opts);
            entry.delta = std::fabs(*entry.stored - *entry.computed);
            bool ok = *entry.delta <= tolerance * std::max(1.0, std::fabs(*entry.stored));
            entry.status = ok ? Status::Match : Status::Mismatch;
        } catch (const std::exception& e) {
            entry.status = Status::Uncomputable;
            entry.computed.reset();
            entry.reason = e.what();
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

std::vector<rdf::Iri> dependency_order(const ann::Dataset& data) {
    enum class Mark { Visiting, Done };
    std::map<rdf::Iri, Mark> marks;
    std::vector<rdf::Iri> order;
    std::vector<rdf::Iri> stack;

    std::function<void(const rdf::Iri&)> visit = [&](const rdf::Iri& id) {
        if (auto it = marks.find(id); it != marks.end()) {
            if (it->second == Mark::Done) return;
            auto from = std::find(stack.begin(), stack.end(), id);
            std::vector<rdf::Iri> cycle(from, stack.end());
            cycle.push_back(id);
            throw ann::CyclicDerivation(std::move(cycle));
        }
        const auto* d = data.derivation(id);
        if (!d) return;
        marks[id] = Mark::Visiting;
        stack.push_back(id);
        for (const auto& arg : d->args)
            if (auto* ref = std::get_if<rdf::Iri>(&arg.source)) visit(*ref);
        stack.pop_back();
        marks[id] = Mark::Done;
        order.push_back(id);
    };
    for (const auto& [id, d] : data.derivations()) visit(id);
    return order;
}

rdf::Graph recompute(const rdf::Graph& g, CdStore& store, const BaseEnv& base, const PipelineOptions& opts) {
    ann::Dataset data(g, opts.vocab, opts.warn);
    rdf::Graph out = g;
    for (const auto& id : dependency_order(data)) {
        double value = 0;
        try {
            value = compute_derivation(*data.derivation(id), data, store, base, opts);
            if (!std::isfinite(value)) throw EvaluationError("non-finite result");
        } catch (const ann::CyclicDerivation&) {
            throw;
        } catch (const std::exception& e) {
            throw RecomputeError(id, e.what());
        }
        auto dec = Decimal::from_double(value);
        data.set_value(id, dec);
        for (const auto& t : out.match(id, opts.vocab.value, std::nullopt)) out.erase(t);
        out.insert({id, opts.vocab.value, rdf::typed_literal(dec.to_string(), "decimal")});
    }
    return out;
}

QueryResult query_max_increase(const rdf::Graph& g, const rdf::Iri& metric, const rdf::Iri& region_class,
                               const rdf::Iri& t1, const rdf::Iri& t2, CdStore& store, const BaseEnv& base,
                               const PipelineOptions& opts) {
    ann::Dataset data(g, opts.vocab, opts.warn);
    auto is_region = [&](const rdf::Iri& dim) {
        return g.contains(rdf::Triple{dim, opts.vocab.type, region_class});
    };

    std::map<rdf::Iri, std::optional<double>> before, after;
    for (const auto& [id, d] : data.derivations()) {
        if (d.function != metric) continue;
        const auto* p = data.point(id);
        if (!p) continue;
        auto region = std::find_if(p->dimensions.begin(), p->dimensions.end(), is_region);
        if (region == p->dimensions.end()) continue;
        bool at_t1 = std::binary_search(p->dimensions.begin(), p->dimensions.end(), t1);
        bool at_t2 = std::binary_search(p->dimensions.begin(), p->dimensions.end(), t2);
        if (at_t1 == at_t2) continue;
        auto& slot = at_t1 ? before : after;
        if (slot.count(*region)) continue;  // first point by IRI wins
        try {
            slot[*region] = compute_derivation(d, data, store, base, opts);
        } catch (const std::exception& e) {
            if (opts.warn) opts.warn("skipping " + id.str() + ": " + e.what());
        }
    }

    std::optional<QueryResult> best;
    for (const auto& [region, v1] : before) {
        auto it = after.find(region);
        if (!v1 || it == after.end() || !it->second) continue;
        double inc = *it->second - *v1;
        // `before` iterates in IRI order, so strict > keeps the smallest IRI on ties.
        if (!best || inc > best->increase) best = QueryResult{region, inc, *v1, *it->second};
    }
    if (!best) throw NoComputableRegion();
    return *best;
}

}  // namespace omld::rewrite
