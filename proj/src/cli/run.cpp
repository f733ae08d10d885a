#include "dfrkit/cli/run.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dfrkit/counterexamples.hpp"
#include "dfrkit/errors.hpp"
#include "dfrkit/estimate.hpp"
#include "dfrkit/format.hpp"
#include "dfrkit/hypotheses.hpp"
#include "dfrkit/vamodels.hpp"

namespace dfr::cli {

namespace {

using nlohmann::json;

McOptions mc_options(const ExperimentConfig& c, std::size_t n_samples) {
    McOptions o;
    o.n_samples = n_samples;
    o.seed = c.seed;
    o.chunk_size = c.chunk_size;
    o.threads = c.threads;
    return o;
}

json estimate_json(const SurvivalSequenceEstimate& est) {
    json j;
    j["kind"] = std::string(to_string(est.kind));
    j["p_hat"] = est.p;
    j["se"] = est.se;
    if (est.kind == EstimateKind::MonteCarlo) {
        j["seed"] = est.meta.seed;
        j["n_samples"] = est.meta.n_samples;
        j["chunk_size"] = est.meta.chunk_size;
    } else {
        j["seed"] = nullptr;
    }
    if (est.kind == EstimateKind::Quadrature) j["tol"] = est.meta.tol;
    j["warnings"] = est.meta.warnings;
    return j;
}

json report_json(const LogConvexityReport& r) {
    json j;
    j["kind"] = std::string(to_string(r.kind));
    j["alpha"] = r.alpha;
    j["threshold"] = r.threshold;
    j["seed"] = r.kind == EstimateKind::MonteCarlo ? json(r.seed) : json(nullptr);
    j["margins"] = json::array();
    for (const auto& m : r.entries) {
        j["margins"].push_back(
            {{"n", m.n}, {"margin", m.margin}, {"margin_se", m.margin_se}, {"verdict", std::string(to_string(m.verdict))}});
    }
    j["any_violated"] = r.any_violated();
    return j;
}

SurvivalSequenceEstimate estimate(const ExperimentConfig& c) {
    if (c.estimator == "closed") {
        double lambda = 0.0;
        double mu = 0.0;
        if (c.lambda && c.mu) {
            lambda = *c.lambda;
            mu = *c.mu;
        } else {
            // Any repair rule on an Exponential base leaves a Poisson process.
            lambda = c.model->base.params.at(0);
            mu = c.random_time->params.at(0);
        }
        return closed_form_poisson_exp(lambda, mu, c.n_max);
    }
    const VirtualAgeModel model = c.model->build();
    const RandomTime T{c.random_time->build(), std::nullopt};
    if (c.estimator == "quad") return estimate_sequence_quadrature(model, T, c.n_max, c.tol);
    return estimate_sequence_mc(model, T, c.n_max, mc_options(c, c.n_samples));
}

void summarize_estimate(std::ostream& os, const SurvivalSequenceEstimate& est) {
    os << "estimator " << to_string(est.kind);
    if (est.kind == EstimateKind::MonteCarlo) os << " seed " << est.meta.seed << " samples " << est.meta.n_samples;
    os << '\n' << std::left << std::setw(6) << "n" << std::setw(26) << "p_hat" << "se\n";
    for (std::size_t n = 0; n < est.p.size(); ++n) {
        os << std::setw(6) << n << std::setw(26) << format_double(est.p[n]) << format_double(est.se[n]) << '\n';
    }
    for (const auto& w : est.meta.warnings) os << "warning: " << w << '\n';
    os << std::right;
}

void summarize_report(std::ostream& os, const LogConvexityReport& r) {
    os << std::left << std::setw(6) << "n" << std::setw(26) << "margin" << std::setw(26) << "margin_se" << "verdict\n";
    for (const auto& m : r.entries) {
        os << std::setw(6) << m.n << std::setw(26) << format_double(m.margin) << std::setw(26)
           << format_double(m.margin_se) << to_string(m.verdict) << '\n';
    }
    os << std::right;
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& artifact, std::ostream* summary) {
    const VirtualAgeModel model = c.model->build();
    json rows = json::array();
    if (c.format == "csv") write_trajectory_csv_header(artifact);
    std::size_t absorbed = 0;
    for (std::size_t i = 0; i < c.n_samples; ++i) {
        RngStream rng(c.seed, streams::kTrajectory + i);
        const Trajectory t = sample_trajectory(model, c.n_max, rng);
        if (t.absorbed_at) ++absorbed;
        if (c.format == "csv") {
            write_trajectory_csv(artifact, t, i, c.seed);
        } else {
            rows.push_back({{"trajectory_id", i}, {"seed", c.seed}, {"x", t.x}, {"a", t.a}, {"v", t.v}, {"s", t.s}});
        }
    }
    if (c.format == "json") artifact << json{{"trajectories", rows}}.dump(2) << '\n';
    if (summary) {
        *summary << "simulated " << c.n_samples << " trajectories of " << c.n_max << " interarrivals, seed " << c.seed
                 << ", " << absorbed << " absorbed\n";
    }
    return kExitOk;
}

int cmd_estimate(const ExperimentConfig& c, std::ostream& artifact, std::ostream* summary) {
    const auto est = estimate(c);
    if (c.format == "csv") {
        write_estimate_csv(artifact, est);
    } else {
        artifact << estimate_json(est).dump(2) << '\n';
    }
    if (summary) summarize_estimate(*summary, est);
    return kExitOk;
}

int cmd_verify(const ExperimentConfig& c, std::ostream& artifact, std::ostream* summary) {
    const auto est = estimate(c);
    const auto report = check_discrete_dfr(est, c.alpha);
    if (c.format == "csv") {
        write_report_csv(artifact, report);
    } else {
        artifact << json{{"estimate", estimate_json(est)}, {"report", report_json(report)}}.dump(2) << '\n';
    }
    if (summary) summarize_report(*summary, report);
    return report.any_violated() ? kExitViolation : kExitOk;
}

int cmd_hypotheses(const ExperimentConfig& c, std::ostream& artifact, std::ostream* summary) {
    const VirtualAgeModel model = c.model->build();
    const Grid t_grid = c.grid.build(model.base);
    const Grid history_grid = c.history_grid.build(model.base);
    const bool deterministic = is_deterministic(model.policy);
    const bool kijima1 = std::holds_alternative<KijimaI>(model.rule);
    const bool all = c.check == "all";

    std::vector<HypothesisReport> reports;
    std::vector<std::string> skipped;
    auto wanted = [&](const std::string& name, bool applicable, const std::string& why) {
        if (c.check == name) return true;
        if (!all) return false;
        if (!applicable) skipped.push_back(name + ": " + why);
        return applicable;
    };

    if (wanted("prcon", deterministic, "needs a deterministic repair policy")) {
        reports.push_back(check_prcon_hypothesis(model.base, induced_kernel(model, 1), history_grid, t_grid));
    }
    if (wanted("t2star", deterministic, "needs a deterministic repair policy")) {
        reports.push_back(check_t2star_conditions(model, c.depth, history_grid, t_grid));
    }
    if (wanted("kijima1", kijima1 && c.random_time.has_value(), "needs the Kijima I rule and a random time")) {
        reports.push_back(check_kijima1_conditions(model, RandomTime{c.random_time->build(), std::nullopt}, t_grid));
    }
    if (wanted("cassoc", deterministic && c.random_time.has_value(),
               "needs a deterministic repair policy and a random time")) {
        CassocOptions o;
        o.unconditional = default_pair_battery();
        o.conditional = default_pair_battery();
        o.history_grid = history_grid;
        o.t_grid = t_grid;
        o.samples = c.n_samples;
        o.conditional_samples = std::max<std::size_t>(1000, c.n_samples / 5);
        o.alpha = c.alpha;
        o.seed = c.seed;
        reports.push_back(
            check_cassoc_conditions(as_process(model), RandomTime{c.random_time->build(), std::nullopt}, o));
    }

    if (c.format == "json") {
        json j;
        j["seed"] = c.seed;
        j["reports"] = json::array();
        for (const auto& r : reports) j["reports"].push_back(to_json(r));
        j["skipped"] = skipped;
        artifact << j.dump(2) << '\n';
    } else {
        artifact << "subject,condition,status,detail,seed\n";
        for (const auto& r : reports) {
            for (const auto& cond : r.conditions) {
                std::string detail = cond.detail;
                for (auto& ch : detail) {
                    if (ch == ',' || ch == '\n') ch = ';';
                }
                std::string subject = r.subject;
                for (auto& ch : subject) {
                    if (ch == ',') ch = ';';
                }
                artifact << subject << ',' << cond.label << ',' << to_string(cond.status) << ',' << detail << ','
                         << c.seed << '\n';
            }
        }
    }
    if (summary) {
        for (const auto& r : reports) {
            *summary << r.subject << ": " << to_string(r.overall) << '\n';
            for (const auto& cond : r.conditions) {
                *summary << "  " << std::left << std::setw(24) << cond.label << std::right << to_string(cond.status)
                         << "  " << cond.detail << '\n';
            }
        }
        for (const auto& s : skipped) *summary << "skipped " << s << '\n';
    }
    return kExitOk;
}

int cmd_counterexample(const ExperimentConfig& c, std::ostream& artifact, std::ostream* summary) {
    CounterexampleReport report;
    if (c.name == "kijima2") {
        std::optional<McOptions> replicate;
        if (c.replicate_samples > 0) replicate = mc_options(c, c.replicate_samples);
        report = kijima2_restart(std::min(c.tol, 1e-4), replicate);
    } else {
        const Lifetime w = c.w ? c.w->build() : exponential(1.0);
        report = ber_scaled_association(c.p, w, c.n_samples, c.seed);
    }
    if (c.format == "json") {
        artifact << to_json(report).dump(2) << '\n';
    } else {
        write_table(artifact, report);
    }
    if (summary) write_table(*summary, report);
    return report.claim_verdict == Status::Violated ? kExitViolation : kExitOk;
}

int dispatch(const ExperimentConfig& c, std::ostream& artifact, std::ostream* summary) {
    if (c.command == "simulate") return cmd_simulate(c, artifact, summary);
    if (c.command == "estimate") return cmd_estimate(c, artifact, summary);
    if (c.command == "verify-dfr") return cmd_verify(c, artifact, summary);
    if (c.command == "hypotheses") return cmd_hypotheses(c, artifact, summary);
    if (c.command == "counterexample") return cmd_counterexample(c, artifact, summary);
    throw ConfigError("config.command: unknown command '" + c.command + "'");
}

}  // namespace

int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate(config);
        if (config.out.empty()) return dispatch(config, out, nullptr);
        // Buffer first so a failed run never leaves a partial artifact.
        std::ostringstream buffer;
        const int code = dispatch(config, buffer, &out);
        std::ofstream file(config.out, std::ios::binary);
        if (!file) throw ConfigError("config.out: cannot write '" + config.out + "'");
        file << buffer.str();
        if (!file) throw ConfigError("config.out: write to '" + config.out + "' failed");
        out << "wrote " << config.out << '\n';
        return code;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const UnsupportedError& e) {
        err << "unsupported: " << e.what() << '\n';
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitError;
}

}  // namespace dfr::cli
