#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dfrkit/cli/config.hpp"
#include "dfrkit/cli/run.hpp"

namespace {

// Command-line values left unset keep the configuration file's value.
struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> nmax;
    std::optional<double> alpha;
    std::optional<double> tol;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> chunk;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> estimator;
    std::optional<std::string> closed_form;
    std::optional<double> lambda;
    std::optional<double> mu;
    std::optional<std::string> name;
    std::optional<double> p;
    std::optional<std::string> check;
    std::optional<std::size_t> depth;
    std::optional<std::size_t> replicate;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--samples", o.samples, "trajectories or draws");
    cmd->add_option("--nmax", o.nmax, "largest n");
    cmd->add_option("--alpha", o.alpha, "significance level");
    cmd->add_option("--tol", o.tol, "quadrature tolerance");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    cmd->add_option("--chunk", o.chunk, "Monte Carlo chunk size");
    cmd->add_option("--out", o.out, "write the artifact here and print a summary");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void apply(const Overrides& o, dfr::cli::ExperimentConfig& c) {
    if (o.seed) c.seed = *o.seed;
    if (o.samples) c.n_samples = *o.samples;
    if (o.nmax) c.n_max = *o.nmax;
    if (o.alpha) c.alpha = *o.alpha;
    if (o.tol) c.tol = *o.tol;
    if (o.threads) c.threads = *o.threads;
    if (o.chunk) c.chunk_size = *o.chunk;
    if (o.out) c.out = *o.out;
    if (o.format) c.format = *o.format;
    if (o.estimator) c.estimator = *o.estimator;
    if (o.closed_form) {
        c.closed_form = *o.closed_form;
        c.estimator = "closed";
    }
    if (o.lambda) c.lambda = *o.lambda;
    if (o.mu) c.mu = *o.mu;
    if (o.name) c.name = *o.name;
    if (o.p) c.p = *o.p;
    if (o.check) c.check = *o.check;
    if (o.depth) c.depth = *o.depth;
    if (o.replicate) c.replicate_samples = *o.replicate;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-DFR toolkit for virtual-age counting processes"};
    app.require_subcommand(1);
    Overrides o;

    auto* simulate = app.add_subcommand("simulate", "sample virtual-age trajectories");
    auto* estimate = app.add_subcommand("estimate", "estimate P(N(T) >= n) for n = 0..nmax");
    auto* verify = app.add_subcommand("verify-dfr", "check log-convexity of the survival sequence");
    auto* hypotheses = app.add_subcommand("hypotheses", "check the sufficient conditions on a model");
    auto* counter = app.add_subcommand("counterexample", "reproduce a named counterexample");
    for (auto* cmd : {simulate, estimate, verify, hypotheses, counter}) add_common(cmd, o);
    for (auto* cmd : {estimate, verify}) {
        cmd->add_option("--estimator", o.estimator, "mc, quad or closed")->check(CLI::IsMember({"mc", "quad", "closed"}));
        cmd->add_option("--closed-form", o.closed_form, "closed-form model")->check(CLI::IsMember({"poisson-exp"}));
        cmd->add_option("--lambda", o.lambda, "Poisson arrival rate");
        cmd->add_option("--mu", o.mu, "Exponential rate of T");
    }
    hypotheses->add_option("--check", o.check, "which conditions")
        ->check(CLI::IsMember({"all", "t2star", "kijima1", "prcon", "cassoc"}));
    hypotheses->add_option("--depth", o.depth, "history length for the kernel conditions");
    counter->add_option("--name", o.name, "kijima2 or ber-scaled")->check(CLI::IsMember({"kijima2", "ber-scaled"}));
    counter->add_option("--p", o.p, "Bernoulli parameter (ber-scaled)");
    counter->add_option("--replicate", o.replicate, "Monte Carlo replication size (kijima2)");

    CLI11_PARSE(app, argc, argv);

    dfr::cli::ExperimentConfig config;
    try {
        if (!o.config.empty()) config = dfr::cli::load_config(o.config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return dfr::cli::kExitError;
    }
    config.command = app.get_subcommands().front()->get_name();
    apply(o, config);
    return dfr::cli::run(config, std::cout, std::cerr);
}
