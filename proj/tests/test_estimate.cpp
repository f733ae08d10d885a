#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "dfrkit/errors.hpp"
#include "dfrkit/estimate.hpp"
#include "dfrkit/stats.hpp"

using namespace dfr;

namespace {

const double kE1 = std::exp(-1.0);

// sum_{k>=1} 1/(k k!), summed independently of the library.
double series_oracle() {
    double sum = 0.0;
    double fact = 1.0;
    for (int k = 1; k < 30; ++k) {
        fact *= k;
        sum += 1.0 / (k * fact);
    }
    return sum;
}

VirtualAgeModel restart_model() { return {uniform_zero_to(1.0), KijimaII{}, DeterministicSequence{{1.0, 0.0}}}; }

McOptions mc(std::size_t n, std::uint64_t seed) {
    McOptions o;
    o.n_samples = n;
    o.seed = seed;
    return o;
}

}  // namespace

TEST_CASE("closed form poisson/exponential") {
    const auto e = closed_form_poisson_exp(1.0, 1.0, 4);
    CHECK(e.kind == EstimateKind::ClosedForm);
    CHECK(e.p[0] == 1.0);
    CHECK(e.p[3] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(closed_form_poisson_exp(2.0, 1.0, 2).p[2] == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
    CHECK(closed_form_poisson_exp(3.0, 0.5, 0).p[0] == 1.0);
    CHECK_THROWS_AS(closed_form_poisson_exp(0.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(closed_form_poisson_exp(1.0, -1.0, 2), DomainError);

    const auto r = check_discrete_dfr(closed_form_poisson_exp(1.0, 1.0, 6));
    CHECK(r.entries.size() == 5);
    for (const auto& m : r.entries) {
        CHECK(std::abs(m.margin) < 1e-12);
        CHECK(m.verdict == Status::Holds);
    }
}

TEST_CASE("monte carlo: renewal exponential matches 2^-n") {
    const VirtualAgeModel m{exponential(1.0), KijimaI{}, DeterministicConstant{0.0}};
    const RandomTime T{exponential(1.0), std::nullopt};
    const auto e = estimate_sequence_mc(m, T, 6, mc(200000, 3));
    CHECK(e.kind == EstimateKind::MonteCarlo);
    CHECK(e.p[0] == 1.0);
    CHECK(e.se[0] == 0.0);
    for (std::size_t n = 1; n <= 6; ++n) {
        CAPTURE(n);
        CHECK(std::abs(e.p[n] - std::pow(2.0, -static_cast<double>(n))) < 3.0 * e.se[n]);
    }
    CHECK(e.cov.size() == 49);
}

TEST_CASE("monte carlo sequences are monotone up to noise") {
    const VirtualAgeModel m{weibull(2.0, 1.0), KijimaII{}, DeterministicConstant{0.5}};
    const RandomTime T{gamma(0.5, 1.0), std::nullopt};
    const auto e = estimate_sequence_mc(m, T, 8, mc(20000, 1));
    CHECK(e.p[0] == 1.0);
    for (std::size_t n = 0; n < 8; ++n) CHECK(e.p[n + 1] <= e.p[n] + 2.0 * (e.se[n] + e.se[n + 1]));
}

TEST_CASE("monte carlo input validation") {
    const VirtualAgeModel m{exponential(1.0), KijimaI{}, DeterministicConstant{0.0}};
    const RandomTime T{exponential(1.0), std::nullopt};
    CHECK_THROWS_AS(estimate_sequence_mc(m, T, 0, mc(1000, 1)), DomainError);
    CHECK_THROWS_AS(estimate_sequence_mc(m, T, 2, mc(999, 1)), DomainError);
}

TEST_CASE("monte carlo is bit-reproducible across thread counts") {
    const VirtualAgeModel m{weibull(2.0, 1.0), KijimaI{}, IidRandom{uniform_zero_to(1.0)}};
    const RandomTime T{gamma(0.5, 1.0), std::nullopt};
    McOptions a = mc(30000, 9);
    a.chunk_size = 1000;
    a.threads = 1;
    McOptions b = a;
    b.threads = 4;
    const auto ea = estimate_sequence_mc(m, T, 5, a);
    const auto eb = estimate_sequence_mc(m, T, 5, b);
    CHECK(ea.p == eb.p);
    CHECK(ea.se == eb.se);
    CHECK(ea.cov == eb.cov);
}

TEST_CASE("quadrature on the restart model") {
    const RandomTime T{exponential(1.0), std::nullopt};
    const auto q = estimate_sequence_quadrature(restart_model(), T, 3, 1e-10);
    CHECK(q.kind == EstimateKind::Quadrature);
    const double p1 = 1.0 - kE1;
    const double p2 = kE1 * series_oracle();
    CHECK(std::abs(q.p[1] - p1) < 1e-9);
    CHECK(std::abs(q.p[2] - p2) < 1e-9);
    CHECK(std::abs(q.p[3] - p1 * p2) < 1e-9);
    CHECK(std::abs(p2 - 0.48482911) < 5e-9);
    for (std::size_t n = 0; n < 3; ++n) CHECK(q.p[n + 1] <= q.p[n]);
}

TEST_CASE("quadrature agrees with closed forms on renewal models") {
    const VirtualAgeModel m{exponential(2.0), KijimaII{}, DeterministicConstant{0.3}};
    const RandomTime T{exponential(1.0), std::nullopt};
    const auto q = estimate_sequence_quadrature(m, T, 3, 1e-10);
    const auto c = closed_form_poisson_exp(2.0, 1.0, 3);
    for (std::size_t n = 0; n <= 3; ++n) CHECK(std::abs(q.p[n] - c.p[n]) < 1e-9);
}

TEST_CASE("quadrature rejects unsupported inputs") {
    const RandomTime T{exponential(1.0), std::nullopt};
    CHECK_THROWS_AS(estimate_sequence_quadrature(restart_model(), T, 4), UnsupportedError);
    const VirtualAgeModel random{uniform_zero_to(1.0), KijimaI{}, IidRandom{uniform_zero_to(1.0)}};
    CHECK_THROWS_AS(estimate_sequence_quadrature(random, T, 2), UnsupportedError);
    const VirtualAgeModel emp{empirical({0.5, 1.0}), KijimaI{}, DeterministicConstant{0.0}};
    CHECK_THROWS_AS(estimate_sequence_quadrature(emp, T, 2), UnsupportedError);
}

TEST_CASE("monte carlo agrees with quadrature in coverage") {
    const VirtualAgeModel m{weibull(2.0, 1.0), KijimaI{}, DeterministicConstant{0.5}};
    const RandomTime T{gamma(0.5, 1.0), std::nullopt};
    const auto q = estimate_sequence_quadrature(m, T, 3, 1e-9);
    for (std::size_t n = 1; n <= 3; ++n) {
        int covered = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto e = estimate_sequence_mc(m, T, 3, mc(20000, seed));
            if (std::abs(e.p[n] - q.p[n]) <= 3.0 * e.se[n]) ++covered;
        }
        CAPTURE(n);
        CHECK(covered >= 9);
    }
}

TEST_CASE("discrete DFR verdicts") {
    SurvivalSequenceEstimate exact;
    exact.kind = EstimateKind::Quadrature;
    exact.meta.tol = 1e-9;
    const double p1 = 1.0 - kE1;
    const double p2 = kE1 * series_oracle();
    exact.p = {1.0, p1, p2, p1 * p2};
    exact.se = {0, 0, 0, 0};
    const auto r = check_discrete_dfr(exact);
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].margin == doctest::Approx(p2 - p1 * p1));
    CHECK(r.entries[0].verdict == Status::Holds);
    CHECK(r.entries[1].margin == doctest::Approx(p1 * p1 * p2 - p2 * p2));
    CHECK(r.entries[1].verdict == Status::Violated);
    CHECK(r.any_violated());

    SurvivalSequenceEstimate short_est;
    short_est.p = {1.0, 0.5};
    short_est.se = {0, 0};
    CHECK_THROWS_AS(check_discrete_dfr(short_est), DomainError);
}

TEST_CASE("monte carlo verdict thresholds") {
    const VirtualAgeModel m{exponential(1.0), KijimaI{}, DeterministicConstant{0.0}};
    const RandomTime T{exponential(1.0), std::nullopt};
    const auto e = estimate_sequence_mc(m, T, 6, mc(20000, 5));
    const auto r = check_discrete_dfr(e, 0.01);
    // Bonferroni over 5 margins is stricter than a single two-sided test.
    CHECK(r.threshold == doctest::Approx(normal_quantile(1.0 - 0.01 / 10.0)));
    CHECK(r.threshold > normal_quantile(1.0 - 0.01 / 2.0));
    for (const auto& entry : r.entries) {
        CHECK(entry.margin_se > 0.0);
        if (entry.verdict == Status::Violated) CHECK(entry.margin < -r.threshold * entry.margin_se);
        if (entry.verdict == Status::Holds) CHECK(entry.margin > r.threshold * entry.margin_se);
        if (std::abs(entry.margin) <= r.threshold * entry.margin_se) CHECK(entry.verdict == Status::Inconclusive);
    }
}

TEST_CASE("margin standard error matches the delta method") {
    const VirtualAgeModel m{weibull(2.0, 1.0), KijimaI{}, DeterministicConstant{0.5}};
    const RandomTime T{exponential(1.0), std::nullopt};
    const auto e = estimate_sequence_mc(m, T, 4, mc(10000, 2));
    const auto r = check_discrete_dfr(e, 0.01);
    const double N = static_cast<double>(e.meta.n_samples);
    for (const auto& entry : r.entries) {
        const std::size_t n = entry.n;
        const double g[3] = {e.p[n + 2], -2.0 * e.p[n + 1], e.p[n]};
        double var = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) var += g[i] * g[j] * e.covariance(n + i, n + j);
        CHECK(entry.margin_se == doctest::Approx(std::sqrt(var / N)).epsilon(1e-10));
        CHECK(entry.margin == doctest::Approx(e.p[n] * e.p[n + 2] - e.p[n + 1] * e.p[n + 1]).epsilon(1e-14));
    }
}

TEST_CASE("common atom at zero warns") {
    const RandomTime T{empirical({0.0, 1.0, 2.0}), std::nullopt};
    const auto x1 = empirical({0.0, 0.5});
    CHECK(common_atom_warning(x1, T).has_value());
    CHECK_FALSE(common_atom_warning(exponential(1.0), T).has_value());
    const VirtualAgeModel m{x1, KijimaI{}, DeterministicConstant{0.0}};
    const auto e = estimate_sequence_mc(m, T, 2, mc(1000, 1));
    CHECK_FALSE(e.meta.warnings.empty());
}

TEST_CASE("csv outputs cite kind and seed") {
    std::ostringstream a;
    write_estimate_csv(a, closed_form_poisson_exp(1.0, 1.0, 2));
    CHECK(a.str() == "n,p_hat,se,kind,seed\n0,1,0,CLOSED_FORM,-\n1,0.5,0,CLOSED_FORM,-\n2,0.25,0,CLOSED_FORM,-\n");
    std::ostringstream b;
    write_report_csv(b, check_discrete_dfr(closed_form_poisson_exp(1.0, 1.0, 2)));
    CHECK(b.str() == "n,margin,margin_se,verdict,kind,seed\n0,0,0,HOLDS,CLOSED_FORM,-\n");
}
