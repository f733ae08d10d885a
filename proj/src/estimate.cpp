#include "dfrkit/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "dfrkit/errors.hpp"
#include "dfrkit/format.hpp"
#include "dfrkit/quadrature.hpp"
#include "dfrkit/stats.hpp"

namespace dfr {

std::string_view to_string(EstimateKind k) {
    switch (k) {
        case EstimateKind::MonteCarlo: return "MC";
        case EstimateKind::Quadrature: return "QUADRATURE";
        case EstimateKind::ClosedForm: return "CLOSED_FORM";
    }
    return "?";
}

std::optional<std::string> common_atom_warning(const Lifetime& first_interarrival, const RandomTime& T) {
    if (first_interarrival.atom_at_zero() > 0.0 && T.law.atom_at_zero() > 0.0) {
        return "T and X1 share an atom at 0; P(N(T) >= n) = E[S_T(S_n)] may not hold";
    }
    return std::nullopt;
}

SurvivalSequenceEstimate estimate_sequence_mc(const ArrivalSampler& sampler, const RandomTime& T, std::size_t n_max,
                                              const McOptions& options) {
    if (n_max < 1) throw DomainError("estimate_sequence_mc: n_max must be at least 1");
    if (options.n_samples < 1000) throw DomainError("estimate_sequence_mc: need at least 1000 samples");
    if (options.chunk_size == 0) throw DomainError("estimate_sequence_mc: chunk size must be positive");

    const std::size_t dim = n_max + 1;
    const std::size_t n_chunks = (options.n_samples + options.chunk_size - 1) / options.chunk_size;
    std::vector<MomentAccumulator> parts(n_chunks, MomentAccumulator(dim));

    std::atomic<std::size_t> next_chunk{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        std::vector<double> arrivals(dim);
        std::vector<double> values(dim);
        try {
            for (std::size_t c = next_chunk++; c < n_chunks; c = next_chunk++) {
                const std::size_t begin = c * options.chunk_size;
                const std::size_t end = std::min(options.n_samples, begin + options.chunk_size);
                MomentAccumulator acc(dim);
                for (std::size_t i = begin; i < end; ++i) {
                    RngStream rng(options.seed, streams::kTrajectory + i);
                    sampler(arrivals, rng);
                    values[0] = 1.0;
                    for (std::size_t n = 1; n < dim; ++n) values[n] = T.law.survival(arrivals[n]);
                    acc.add(values);
                }
                parts[c] = std::move(acc);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next_chunk = n_chunks;
        }
    };

    std::size_t threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    threads = std::min(threads, n_chunks);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    const MomentAccumulator total = merge_pairwise(std::move(parts));
    SurvivalSequenceEstimate est;
    est.kind = EstimateKind::MonteCarlo;
    est.p = total.mean();
    est.p[0] = 1.0;
    est.cov = total.covariance();
    est.se.resize(dim);
    const double n = static_cast<double>(total.count());
    for (std::size_t i = 0; i < dim; ++i) est.se[i] = std::sqrt(std::max(0.0, est.cov[i * dim + i]) / n);
    est.meta.seed = options.seed;
    est.meta.n_samples = options.n_samples;
    est.meta.chunk_size = options.chunk_size;
    return est;
}

SurvivalSequenceEstimate estimate_sequence_mc(const VirtualAgeModel& model, const RandomTime& T, std::size_t n_max,
                                              const McOptions& options) {
    auto sampler = [&model](std::span<double> arrivals, RngStream& rng) { sample_arrivals(model, arrivals, rng); };
    SurvivalSequenceEstimate est = estimate_sequence_mc(ArrivalSampler(sampler), T, n_max, options);
    if (auto w = common_atom_warning(model.base, T)) est.meta.warnings.push_back(*w);
    return est;
}

namespace {

/// E[S_T(s + X_{k+1} + ... + X_n) | V_k = v] by nested quadrature over the
/// inverse-transform uniforms. The integrand is in [0,1], so the relative
/// target of each level bounds its absolute error.
double chain_expectation(const VirtualAgeModel& model, const RandomTime& T, std::size_t k, std::size_t n, double v,
                         double s, double tol) {
    if (k == n) return T.law.survival(s);
    const double a = degree_at(model.policy, k + 1);
    if (!(model.base.survival(v) > 0.0)) {
        return chain_expectation(model, T, k + 1, n, step_virtual_age(model.rule, v, 0.0, a), s, tol);
    }
    auto integrand = [&](double u) {
        const double x = model.base.residual_quantile(v, u);
        return chain_expectation(model, T, k + 1, n, step_virtual_age(model.rule, v, x, a), s + x, tol);
    };
    return integrate_tanh_sinh(integrand, 0.0, 1.0, tol).value;
}

}  // namespace

SurvivalSequenceEstimate estimate_sequence_quadrature(const VirtualAgeModel& model, const RandomTime& T,
                                                      std::size_t n_max, double tol) {
    if (n_max < 1) throw DomainError("estimate_sequence_quadrature: n_max must be at least 1");
    if (n_max > 3) throw UnsupportedError("estimate_sequence_quadrature: nested quadrature supports n_max <= 3");
    if (!is_deterministic(model.policy)) {
        throw UnsupportedError("estimate_sequence_quadrature: random repair policies need the Monte Carlo estimator");
    }
    if (!model.base.closed_form()) {
        throw UnsupportedError("estimate_sequence_quadrature: base law " + model.base.describe() +
                               " has no closed-form survival");
    }
    if (!(tol > 0.0)) throw DomainError("estimate_sequence_quadrature: tol must be positive");

    SurvivalSequenceEstimate est;
    est.kind = EstimateKind::Quadrature;
    est.p.assign(n_max + 1, 1.0);
    est.se.assign(n_max + 1, 0.0);
    for (std::size_t n = 1; n <= n_max; ++n) est.p[n] = chain_expectation(model, T, 0, n, 0.0, 0.0, tol);
    est.meta.tol = tol;
    if (auto w = common_atom_warning(model.base, T)) est.meta.warnings.push_back(*w);
    return est;
}

SurvivalSequenceEstimate closed_form_poisson_exp(double lambda, double mu, std::size_t n_max) {
    if (!(lambda > 0.0) || !(mu > 0.0)) throw DomainError("closed_form_poisson_exp: rates must be positive");
    SurvivalSequenceEstimate est;
    est.kind = EstimateKind::ClosedForm;
    const double ratio = lambda / (lambda + mu);
    est.p.resize(n_max + 1);
    est.se.assign(n_max + 1, 0.0);
    double value = 1.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        est.p[n] = value;
        value *= ratio;
    }
    return est;
}

bool LogConvexityReport::any_violated() const {
    return std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.verdict == Status::Violated; });
}

LogConvexityReport check_discrete_dfr(const SurvivalSequenceEstimate& est, double alpha) {
    if (est.n_max() < 2) throw DomainError("check_discrete_dfr: need n_max >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("check_discrete_dfr: alpha must lie in (0,1)");

    LogConvexityReport report;
    report.kind = est.kind;
    report.alpha = alpha;
    report.seed = est.meta.seed;
    const std::size_t margins = est.n_max() - 1;
    const auto& p = est.p;

    if (est.kind == EstimateKind::MonteCarlo) {
        report.threshold = normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(margins)));
    } else if (est.kind == EstimateKind::Quadrature) {
        report.threshold = std::max(1e-12, 4.0 * est.meta.tol);
    } else {
        report.threshold = 1e-12;
    }

    for (std::size_t n = 0; n < margins; ++n) {
        MarginEntry e;
        e.n = n;
        e.margin = p[n] * p[n + 2] - p[n + 1] * p[n + 1];
        if (est.kind == EstimateKind::MonteCarlo) {
            const double count = static_cast<double>(est.meta.n_samples);
            const std::size_t idx[3] = {n, n + 1, n + 2};
            const double grad[3] = {p[n + 2], -2.0 * p[n + 1], p[n]};
            double var = 0.0;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) var += grad[i] * grad[j] * est.covariance(idx[i], idx[j]);
            }
            e.margin_se = std::sqrt(std::max(0.0, var) / count);
            const double band = report.threshold * e.margin_se;
            if (e.margin < -band) {
                e.verdict = Status::Violated;
            } else if (e.margin > band) {
                e.verdict = Status::Holds;
            } else {
                e.verdict = Status::Inconclusive;
            }
        } else {
            e.verdict = e.margin < -report.threshold ? Status::Violated : Status::Holds;
        }
        report.entries.push_back(e);
    }
    return report;
}

namespace {

std::string seed_field(EstimateKind kind, std::uint64_t seed) {
    return kind == EstimateKind::MonteCarlo ? std::to_string(seed) : std::string("-");
}

}  // namespace

void write_estimate_csv(std::ostream& os, const SurvivalSequenceEstimate& est) {
    os << "n,p_hat,se,kind,seed\n";
    const std::string seed = seed_field(est.kind, est.meta.seed);
    for (std::size_t n = 0; n < est.p.size(); ++n) {
        os << n << ',' << format_double(est.p[n]) << ',' << format_double(est.se[n]) << ',' << to_string(est.kind)
           << ',' << seed << '\n';
    }
}

void write_report_csv(std::ostream& os, const LogConvexityReport& report) {
    os << "n,margin,margin_se,verdict,kind,seed\n";
    const std::string seed = seed_field(report.kind, report.seed);
    for (const auto& e : report.entries) {
        os << e.n << ',' << format_double(e.margin) << ',' << format_double(e.margin_se) << ',' << to_string(e.verdict)
           << ',' << to_string(report.kind) << ',' << seed << '\n';
    }
}

}  // namespace dfr
