#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dfrkit/counterexamples.hpp"
#include "dfrkit/errors.hpp"
#include "dfrkit/estimate.hpp"

using namespace dfr;

namespace {

// Integral of (e^t - 1)/t on [0,1] by composite Simpson; the integrand
// extends continuously to 1 at t = 0.
double integral_oracle() {
    const int n = 20000;
    const double h = 1.0 / n;
    auto f = [](double t) { return t == 0.0 ? 1.0 : std::expm1(t) / t; };
    double sum = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return sum * h / 3.0;
}

// Cov(X1, X3) with X1 = Y, X3 = W/Y by enumerating Y in {1, 2}.
double two_point_covariance(double p, double mean_w) {
    const double y[2] = {1.0, 2.0};
    const double w[2] = {1.0 - p, p};
    double ey = 0, e_inv = 0, e_prod = 0;
    for (int i = 0; i < 2; ++i) {
        ey += w[i] * y[i];
        e_inv += w[i] / y[i];
        e_prod += w[i] * y[i] * (mean_w / y[i]);
    }
    return e_prod - ey * mean_w * e_inv;
}

double value(const CounterexampleReport& r, const std::string& name) {
    const auto* c = r.find(name);
    REQUIRE(c != nullptr);
    return c->value;
}

}  // namespace

TEST_CASE("series constant") {
    CHECK(std::abs(exponential_integral_series() - integral_oracle()) < 1e-12);
    CHECK(std::abs(exponential_integral_series() - 1.3179021514544) < 1e-12);
}

TEST_CASE("kijima2 restart constants") {
    const auto r = kijima2_restart(1e-9);
    const double e1 = std::exp(-1.0);
    const double p1 = 1.0 - e1;
    const double p2 = e1 * integral_oracle();
    CHECK(std::abs(value(r, "p1") - p1) < 1e-12);
    CHECK(std::abs(value(r, "p2") - p2) < 1e-10);
    CHECK(std::abs(value(r, "p2_quadrature") - value(r, "p2")) < 1e-10);
    CHECK(std::abs(value(r, "p3") - p1 * p2) < 1e-10);
    CHECK(value(r, "p2") > value(r, "p1_squared"));
    REQUIRE(r.margins.size() == 2);
    CHECK(std::abs(r.margins[0].margin - (p2 - p1 * p1)) < 2e-9);
    CHECK(r.margins[0].verdict == Status::Holds);
    CHECK(std::abs(r.margins[1].margin - (p1 * p1 * p2 - p2 * p2)) < 2e-9);
    CHECK(r.margins[1].verdict == Status::Violated);
    CHECK(r.claim_verdict == Status::Violated);
    for (const auto& c : r.constants) CHECK_FALSE(c.derivation.empty());
}

TEST_CASE("kijima2 constants agree with the estimators") {
    const auto r = kijima2_restart(1e-9);
    const RandomTime T{exponential(1.0), std::nullopt};
    const auto q = estimate_sequence_quadrature(kijima2_uniform_model(), T, 3, 1e-9);
    CHECK(std::abs(q.p[1] - value(r, "p1")) < 1e-9);
    CHECK(std::abs(q.p[2] - value(r, "p2")) < 1e-9);
    CHECK(std::abs(q.p[3] - value(r, "p3")) < 1e-9);

    McOptions o;
    o.n_samples = 200000;
    o.seed = 17;
    const auto replicated = kijima2_restart(1e-9, o);
    REQUIRE(replicated.replication.size() == 3);
    for (const auto& c : replicated.replication) {
        CAPTURE(c.name);
        CHECK(c.within_3se == (std::abs(c.estimate - c.exact) <= 3.0 * c.se));
        CHECK(c.within_3se);
    }
}

TEST_CASE("kijima2 tolerance precondition") {
    CHECK_THROWS_AS(kijima2_restart(0.0), DomainError);
    CHECK_THROWS_AS(kijima2_restart(1e-3), DomainError);
    CHECK_NOTHROW(kijima2_restart(1e-4));
}

TEST_CASE("ber-scaled covariance formula") {
    CHECK(ber_scaled_covariance(0.5, 1.0) == doctest::Approx(-0.125).epsilon(1e-15));
    CHECK(ber_scaled_covariance(0.1, 1.0) == doctest::Approx(-0.045).epsilon(1e-14));
    RngStream rng(77, 0);
    for (int i = 0; i < 10; ++i) {
        const double p = rng.uniform();
        const double mean_w = 0.5 + 2.0 * rng.uniform();
        CAPTURE(p);
        CHECK(std::abs(ber_scaled_covariance(p, mean_w) - two_point_covariance(p, mean_w)) < 1e-15);
        CHECK(ber_scaled_covariance(p, mean_w) == doctest::Approx(-mean_w * p * (1.0 - p) / 2.0).epsilon(1e-13));
    }
}

TEST_CASE("ber-scaled empirical refutation") {
    const auto r = ber_scaled_association(0.5, exponential(1.0), 1000000, 8);
    CHECK(value(r, "cov_analytic") == doctest::Approx(-0.125));
    CHECK(std::abs(value(r, "cov_empirical") + 0.125) < 3.0 * value(r, "cov_se"));
    CHECK(r.claim_verdict == Status::Violated);

    const auto tiny = ber_scaled_association(1e-6, exponential(1.0), 1000000, 8);
    CHECK(value(tiny, "cov_analytic") == doctest::Approx(-5e-7).epsilon(1e-5));
    CHECK(tiny.claim_verdict == Status::Inconclusive);

    CHECK_THROWS_AS(ber_scaled_association(0.0, exponential(1.0), 1000, 1), DomainError);
    CHECK_THROWS_AS(ber_scaled_association(1.0, exponential(1.0), 1000, 1), DomainError);
}

TEST_CASE("report rendering") {
    const auto r = kijima2_restart(1e-9);
    std::ostringstream os;
    write_table(os, r);
    CHECK(os.str().find("VIOLATED") != std::string::npos);
    const auto j = to_json(r);
    CHECK(j["claim_verdict"] == "VIOLATED");
    CHECK(j["constants"].size() == r.constants.size());
}
