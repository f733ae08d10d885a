#include "dfrkit/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace dfr::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(path + "." + key, "unknown key (allowed: " + list + ")");
        }
    }
}

double number_at(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) fail(path + "." + key, "missing required number");
    const auto& v = j.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path + "." + key, "expected a finite number");
    return d;
}

double positive_at(const json& j, const std::string& key, const std::string& path) {
    const double d = number_at(j, key, path);
    if (d <= 0.0) fail(path + "." + key, "must be > 0, got " + std::to_string(d));
    return d;
}

std::size_t count_at(const json& j, const std::string& key, const std::string& path) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path + "." + key, "expected a nonnegative integer");
    const auto i = v.get<long long>();
    if (i < 0) fail(path + "." + key, "expected a nonnegative integer");
    return static_cast<std::size_t>(i);
}

std::string string_at(const json& j, const std::string& key, const std::string& path) {
    const auto& v = j.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string one_of(const std::string& value, const std::string& path, const std::vector<std::string>& choices) {
    if (std::find(choices.begin(), choices.end(), value) != choices.end()) return value;
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
    fail(path, "unknown value '" + value + "' (expected one of: " + list + ")");
}

GridSpec parse_grid(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"kind", "lo", "hi", "count"});
    GridSpec g;
    if (j.contains("kind")) g.kind = one_of(string_at(j, "kind", path), path + ".kind", {"uniform", "log", "quantile"});
    if (j.contains("lo")) g.lo = number_at(j, "lo", path);
    if (j.contains("hi")) g.hi = number_at(j, "hi", path);
    if (j.contains("count")) g.count = count_at(j, "count", path);
    if (g.count < 2) fail(path + ".count", "a grid needs at least 2 points");
    if (g.kind != "quantile" && !(g.hi > g.lo)) fail(path, "hi must exceed lo");
    if (g.kind == "uniform" && g.lo < 0.0) fail(path + ".lo", "grid points must be >= 0");
    if (g.kind == "log" && g.lo <= 0.0) fail(path + ".lo", "a log-spaced grid needs lo > 0");
    return g;
}

PolicySpec parse_policy(const json& j, const std::string& path) {
    require_object(j, path);
    PolicySpec p;
    p.type = one_of(j.contains("type") ? string_at(j, "type", path) : std::string("constant"), path + ".type",
                    {"constant", "sequence", "iid"});
    if (p.type == "constant") {
        reject_unknown(j, path, {"type", "q"});
        p.q = number_at(j, "q", path);
        if (p.q < 0.0) fail(path + ".q", "repair degree must be >= 0");
    } else if (p.type == "sequence") {
        reject_unknown(j, path, {"type", "degrees"});
        if (!j.contains("degrees") || !j.at("degrees").is_array() || j.at("degrees").empty())
            fail(path + ".degrees", "expected a nonempty array of degrees");
        for (const auto& d : j.at("degrees")) {
            if (!d.is_number() || d.get<double>() < 0.0 || !std::isfinite(d.get<double>()))
                fail(path + ".degrees", "every degree must be a finite number >= 0");
            p.degrees.push_back(d.get<double>());
        }
    } else {
        reject_unknown(j, path, {"type", "law"});
        if (!j.contains("law")) fail(path + ".law", "an iid policy needs a degree law");
        p.law = parse_law(j.at("law"), path + ".law");
    }
    return p;
}

ModelSpec parse_model(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"base", "rule", "policy"});
    ModelSpec m;
    if (!j.contains("base")) fail(path + ".base", "missing base interarrival law");
    m.base = parse_law(j.at("base"), path + ".base");
    if (j.contains("rule")) m.rule = one_of(string_at(j, "rule", path), path + ".rule", {"kijima1", "kijima2"});
    if (!j.contains("policy")) fail(path + ".policy", "missing repair policy");
    m.policy = parse_policy(j.at("policy"), path + ".policy");
    return m;
}

}  // namespace

LawSpec parse_law(const json& j, const std::string& path) {
    require_object(j, path);
    if (!j.contains("family")) fail(path + ".family", "missing family");
    LawSpec law;
    law.family = one_of(string_at(j, "family", path), path + ".family",
                        {"exponential", "weibull", "gamma", "uniform", "empirical"});
    if (law.family == "exponential") {
        reject_unknown(j, path, {"family", "rate"});
        law.params = {positive_at(j, "rate", path)};
    } else if (law.family == "weibull") {
        reject_unknown(j, path, {"family", "shape", "scale"});
        law.params = {positive_at(j, "shape", path), positive_at(j, "scale", path)};
    } else if (law.family == "gamma") {
        reject_unknown(j, path, {"family", "shape", "rate"});
        law.params = {positive_at(j, "shape", path), positive_at(j, "rate", path)};
    } else if (law.family == "uniform") {
        reject_unknown(j, path, {"family", "b"});
        law.params = {positive_at(j, "b", path)};
    } else {
        reject_unknown(j, path, {"family", "values"});
        if (!j.contains("values") || !j.at("values").is_array() || j.at("values").empty())
            fail(path + ".values", "expected a nonempty array of observations");
        for (const auto& v : j.at("values")) {
            if (!v.is_number() || !std::isfinite(v.get<double>()) || v.get<double>() < 0.0)
                fail(path + ".values", "every observation must be a finite number >= 0");
            law.values.push_back(v.get<double>());
        }
    }
    return law;
}

Lifetime LawSpec::build() const {
    if (family == "exponential") return exponential(params.at(0));
    if (family == "weibull") return weibull(params.at(0), params.at(1));
    if (family == "gamma") return gamma(params.at(0), params.at(1));
    if (family == "uniform") return uniform_zero_to(params.at(0));
    if (family == "empirical") return empirical(values);
    throw ConfigError("unknown family '" + family + "'");
}

nlohmann::json LawSpec::to_json() const {
    json j{{"family", family}};
    if (family == "exponential") j["rate"] = params.at(0);
    if (family == "weibull") j["shape"] = params.at(0), j["scale"] = params.at(1);
    if (family == "gamma") j["shape"] = params.at(0), j["rate"] = params.at(1);
    if (family == "uniform") j["b"] = params.at(0);
    if (family == "empirical") j["values"] = values;
    return j;
}

RepairPolicy PolicySpec::build() const {
    if (type == "constant") return DeterministicConstant{q};
    if (type == "sequence") return DeterministicSequence{degrees};
    return IidRandom{law.value().build()};
}

VirtualAgeModel ModelSpec::build() const {
    VirtualAgeRule r = KijimaI{};
    if (rule == "kijima2") r = KijimaII{};
    return VirtualAgeModel{base.build(), r, policy.build()};
}

Grid GridSpec::build(const Lifetime& law) const {
    if (kind == "log") return Grid::log_spaced(lo, hi, count);
    if (kind == "quantile") return Grid::quantile_based(law, count);
    return Grid::uniform(lo, hi, count);
}

ExperimentConfig parse_config(const json& j) {
    const std::string root = "config";
    require_object(j, root);
    reject_unknown(j, root,
                   {"command", "model", "random_time", "estimator", "closed_form", "lambda", "mu", "n_max",
                    "n_samples", "seed", "alpha", "tol", "threads", "chunk_size", "grid", "history_grid", "depth",
                    "check", "name", "p", "w", "replicate_samples", "out", "format"});
    ExperimentConfig c;
    if (j.contains("command"))
        c.command = one_of(string_at(j, "command", root), root + ".command",
                           {"simulate", "estimate", "verify-dfr", "hypotheses", "counterexample"});
    if (j.contains("model")) c.model = parse_model(j.at("model"), root + ".model");
    if (j.contains("random_time")) c.random_time = parse_law(j.at("random_time"), root + ".random_time");
    if (j.contains("estimator"))
        c.estimator = one_of(string_at(j, "estimator", root), root + ".estimator", {"mc", "quad", "closed"});
    if (j.contains("closed_form"))
        c.closed_form = one_of(string_at(j, "closed_form", root), root + ".closed_form", {"poisson-exp"});
    if (j.contains("lambda")) c.lambda = positive_at(j, "lambda", root);
    if (j.contains("mu")) c.mu = positive_at(j, "mu", root);
    if (j.contains("n_max")) c.n_max = count_at(j, "n_max", root);
    if (j.contains("n_samples")) c.n_samples = count_at(j, "n_samples", root);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            fail(root + ".seed", "expected a nonnegative integer");
        if (j.at("seed").is_number_integer() && j.at("seed").get<long long>() < 0)
            fail(root + ".seed", "expected a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("alpha")) c.alpha = number_at(j, "alpha", root);
    if (j.contains("tol")) c.tol = number_at(j, "tol", root);
    if (j.contains("threads")) c.threads = count_at(j, "threads", root);
    if (j.contains("chunk_size")) c.chunk_size = count_at(j, "chunk_size", root);
    if (j.contains("grid")) c.grid = parse_grid(j.at("grid"), root + ".grid");
    if (j.contains("history_grid")) c.history_grid = parse_grid(j.at("history_grid"), root + ".history_grid");
    if (j.contains("depth")) c.depth = count_at(j, "depth", root);
    if (j.contains("check"))
        c.check = one_of(string_at(j, "check", root), root + ".check", {"all", "t2star", "kijima1", "prcon", "cassoc"});
    if (j.contains("name")) c.name = one_of(string_at(j, "name", root), root + ".name", {"kijima2", "ber-scaled"});
    if (j.contains("p")) c.p = number_at(j, "p", root);
    if (j.contains("w")) c.w = parse_law(j.at("w"), root + ".w");
    if (j.contains("replicate_samples")) c.replicate_samples = count_at(j, "replicate_samples", root);
    if (j.contains("out")) c.out = string_at(j, "out", root);
    if (j.contains("format")) c.format = one_of(string_at(j, "format", root), root + ".format", {"csv", "json"});
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON (" + std::string(e.what()) + ")");
    }
    return parse_config(j);
}

void validate(const ExperimentConfig& c) {
    const std::string root = "config";
    if (c.command.empty()) fail(root + ".command", "no command given");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail(root + ".alpha", "must lie in (0, 1)");
    if (!(c.tol > 0.0)) fail(root + ".tol", "must be > 0");
    if (c.chunk_size == 0) fail(root + ".chunk_size", "must be >= 1");
    if (c.format != "csv" && c.format != "json") fail(root + ".format", "expected csv or json");
    const bool needs_model = c.command == "simulate" || c.command == "hypotheses" ||
                             ((c.command == "estimate" || c.command == "verify-dfr") && c.estimator != "closed");
    if (needs_model && !c.model) fail(root + ".model", "command '" + c.command + "' needs a model");
    if (c.command == "simulate" && c.n_max == 0) fail(root + ".n_max", "must be >= 1");
    if (c.command == "estimate" || c.command == "verify-dfr") {
        if (c.command == "verify-dfr" && c.n_max < 2) fail(root + ".n_max", "verify-dfr needs n_max >= 2");
        if (c.n_max == 0) fail(root + ".n_max", "must be >= 1");
        if (c.estimator == "closed") {
            const bool explicit_rates = c.lambda && c.mu;
            if (!explicit_rates && !(c.model && c.random_time))
                fail(root + ".lambda", "the closed form needs lambda and mu, or an Exponential model and random_time");
            if (!explicit_rates) {
                if (c.model->base.family != "exponential")
                    fail(root + ".model.base.family", "the closed form needs an Exponential base law");
                if (c.random_time->family != "exponential")
                    fail(root + ".random_time.family", "the closed form needs an Exponential random time");
            }
        } else {
            if (!c.random_time) fail(root + ".random_time", "estimation needs a random time law");
            if (c.estimator == "mc" && c.n_samples < 1000)
                fail(root + ".n_samples", "Monte Carlo needs at least 1000 trajectories");
            if (c.estimator == "quad" && c.n_max > 3)
                fail(root + ".n_max", "quadrature supports n_max <= 3; use the mc estimator");
        }
    }
    if (c.command == "hypotheses" && (c.check == "kijima1" || c.check == "cassoc") && !c.random_time)
        fail(root + ".random_time", "check '" + c.check + "' needs a random time law");
    if (c.command == "counterexample" && c.name == "ber-scaled") {
        if (!(c.p > 0.0 && c.p < 1.0)) fail(root + ".p", "must lie in (0, 1)");
        if (c.n_samples < 1000) fail(root + ".n_samples", "needs at least 1000 samples");
    }
}

}  // namespace dfr::cli
