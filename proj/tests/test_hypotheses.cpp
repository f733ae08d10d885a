#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dfrkit/counterexamples.hpp"
#include "dfrkit/errors.hpp"
#include "dfrkit/hypotheses.hpp"

using namespace dfr;

namespace {

const Grid kT = Grid::uniform(0.0, 5.0, 51);
const Grid kUnitT = Grid::uniform(0.0, 1.0, 41);

VirtualAgeModel uniform_model(VirtualAgeRule rule, RepairPolicy policy) {
    return {uniform_zero_to(1.0), std::move(rule), std::move(policy)};
}

bool every_failed_condition_has_witness(const HypothesisReport& r) {
    for (const auto& c : r.conditions) {
        if (c.status == Status::Violated && c.witness.empty()) return false;
    }
    return true;
}

// Independent vector sampler for the association tests.
VectorSampler independent_exponentials() {
    return [](RngStream& rng) { return std::vector<double>{-std::log(rng.uniform()), -std::log(rng.uniform())}; };
}

}  // namespace

TEST_CASE("prcon hypothesis examples") {
    const auto minimal = uniform_model(KijimaI{}, DeterministicConstant{1.0});
    const Grid x1_grid = Grid::uniform(0.0, 0.9, 10);
    auto pass = check_prcon_hypothesis(minimal.base, induced_kernel(minimal, 1), x1_grid, kUnitT);
    CHECK(pass.overall == Overall::Pass);

    const VirtualAgeModel dfr_base{gamma(0.5, 1.0), KijimaI{}, DeterministicConstant{1.0}};
    auto fail = check_prcon_hypothesis(dfr_base.base, induced_kernel(dfr_base, 1), Grid::uniform(0.0, 3.0, 7), kT);
    CHECK(fail.overall == Overall::Fail);
    CHECK(every_failed_condition_has_witness(fail));

    auto renewal = check_prcon_hypothesis(exponential(1.0), HistoryKernel::constant(1, exponential(1.0)),
                                          Grid::uniform(0.0, 3.0, 7), kT);
    CHECK(renewal.overall == Overall::Pass);
    REQUIRE(renewal.find("ST(Z2,X1)") != nullptr);
    CHECK(renewal.find("ST(Z2,X1)")->detail.find("EQ everywhere") != std::string::npos);
}

TEST_CASE("t2star conditions separate the Kijima II restart model") {
    const Grid h = Grid::uniform(0.05, 0.85, 8);
    const auto restart = uniform_model(KijimaII{}, DeterministicSequence{{1.0, 0.0}});
    auto bad = check_t2star_conditions(restart, 2, h, kUnitT);
    CHECK(bad.overall == Overall::Fail);
    REQUIRE(bad.find("c.2[n=1]") != nullptr);
    CHECK(bad.find("c.2[n=1]")->status == Status::Violated);
    CHECK(every_failed_condition_has_witness(bad));

    const auto counterpart = uniform_model(KijimaI{}, DeterministicSequence{{1.0, 0.0}});
    CHECK(check_t2star_conditions(counterpart, 2, h, kUnitT).overall == Overall::Pass);
}

TEST_CASE("t2star conditions on IFR and perfect-repair models") {
    const VirtualAgeModel weib{weibull(2.0, 1.0), KijimaI{}, DeterministicConstant{0.7}};
    CHECK(check_t2star_conditions(weib, 3, Grid::quantile_based(weib.base, 8), kT).overall == Overall::Pass);

    const VirtualAgeModel perfect{gamma(0.5, 1.0), KijimaII{}, DeterministicConstant{0.0}};
    auto r = check_t2star_conditions(perfect, 3, Grid::quantile_based(perfect.base, 5), kT);
    CHECK(r.overall == Overall::Pass);
    for (const auto& c : r.conditions) CHECK(c.detail.find(", 0 with EQ") == std::string::npos);

    CHECK_THROWS_AS(check_t2star_conditions(uniform_model(KijimaI{}, IidRandom{uniform_zero_to(1.0)}), 1, kUnitT, kUnitT),
                    UnsupportedError);
    CHECK_THROWS_AS(check_t2star_conditions(weib, 0, kT, kT), DomainError);
}

TEST_CASE("worse repair is surfaced in notes") {
    const VirtualAgeModel m{weibull(2.0, 1.0), KijimaI{}, DeterministicConstant{1.5}};
    auto r = check_t2star_conditions(m, 1, Grid::quantile_based(m.base, 4), kT);
    bool noted = false;
    for (const auto& n : r.notes) noted = noted || n.find("worse") != std::string::npos;
    CHECK(noted);
}

TEST_CASE("kijima1 conditions") {
    const RandomTime gamma_t{gamma(0.5, 1.0), std::nullopt};
    const VirtualAgeModel ok{weibull(2.0, 1.0), KijimaI{}, IidRandom{uniform_zero_to(1.0)}};
    CHECK(check_kijima1_conditions(ok, gamma_t, kT).overall == Overall::Pass);

    const VirtualAgeModel dfr_base{gamma(0.5, 1.0), KijimaI{}, DeterministicConstant{0.5}};
    auto bad = check_kijima1_conditions(dfr_base, gamma_t, kT);
    CHECK(bad.overall == Overall::Fail);
    REQUIRE(bad.find("X1-IFR") != nullptr);
    CHECK(bad.find("X1-IFR")->status == Status::Violated);
    CHECK_FALSE(bad.find("X1-IFR")->witness.empty());

    const VirtualAgeModel expo{exponential(1.0), KijimaI{}, DeterministicConstant{0.5}};
    CHECK(check_kijima1_conditions(expo, RandomTime{exponential(1.0), std::nullopt}, kT).overall == Overall::Pass);

    const VirtualAgeModel k2{weibull(2.0, 1.0), KijimaII{}, DeterministicConstant{0.5}};
    CHECK_THROWS_AS(check_kijima1_conditions(k2, gamma_t, kT), std::invalid_argument);

    const VirtualAgeModel atom{empirical({0.0, 1.0, 2.0}), KijimaI{}, DeterministicConstant{0.5}};
    auto a = check_kijima1_conditions(atom, gamma_t, kT);
    REQUIRE(a.find("no-atom-0") != nullptr);
    CHECK(a.find("no-atom-0")->status == Status::Violated);
}

TEST_CASE("empirical association examples") {
    auto first = [](std::span<const double> v) { return v[0]; };
    auto second = [](std::span<const double> v) { return v[1]; };
    auto indep = empirical_association(independent_exponentials(), first, second, 100000, 1);
    CHECK(std::abs(indep.cov) < 3.0 * indep.se);

    VectorSampler comonotone = [](RngStream& rng) {
        const double x = -std::log(rng.uniform());
        return std::vector<double>{x, x};
    };
    auto var = empirical_association(comonotone, first, second, 100000, 2);
    CHECK(std::abs(var.cov - 1.0) < 3.0 * var.se);

    const auto process = ber_scaled_process(0.5, exponential(1.0));
    VectorSampler x13 = [&](RngStream& rng) {
        auto xs = process.sample(3, rng);
        return std::vector<double>{xs[0], xs[2]};
    };
    auto neg = empirical_association(x13, first, second, 1000000, 3);
    CHECK(std::abs(neg.cov + 0.125) < 3.0 * neg.se);
    CHECK(association_refuted(neg, 0.001));
    CHECK_THROWS(empirical_association(x13, first, second, 999, 3));
}

TEST_CASE("association is never refuted for associated vectors") {
    VectorSampler comonotone = [](RngStream& rng) {
        const double x = rng.uniform();
        return std::vector<double>{x, x * x + 1.0};
    };
    for (const auto& pair : default_pair_battery()) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            CAPTURE(pair.label);
            CHECK_FALSE(association_refuted(empirical_association(independent_exponentials(), pair.f, pair.g, 2000, seed), 0.001));
            CHECK_FALSE(association_refuted(empirical_association(comonotone, pair.f, pair.g, 2000, seed), 0.001));
        }
    }
}

TEST_CASE("cassoc conditions") {
    CassocOptions o;
    o.unconditional = default_pair_battery();
    o.conditional = default_pair_battery();
    o.samples = 20000;
    o.conditional_samples = 5000;
    o.history_grid = Grid::uniform(0.1, 2.0, 4);
    const RandomTime T{gamma(0.5, 1.0), std::nullopt};

    CountingProcess renewal{"renewal", [](std::size_t n) { return HistoryKernel::constant(n, exponential(1.0)); }};
    auto r = check_cassoc_conditions(renewal, T, o);
    CHECK(r.overall == Overall::Partial);
    REQUIRE(r.find("c:ST(X2,X1)") != nullptr);
    CHECK(r.find("c:ST(X2,X1)")->detail.find("EQ") != std::string::npos);

    CassocOptions o3 = o;
    o3.unconditional_dims = 3;
    o3.unconditional = {{"(x1,x3)", [](std::span<const double> v) { return v[0]; },
                         [](std::span<const double> v) { return v[2]; }}};
    o3.conditional.clear();
    o3.history_grid = Grid::uniform(1.0, 2.0, 2);
    o3.samples = 100000;
    auto ber = check_cassoc_conditions(ber_scaled_process(0.5, exponential(1.0)), T, o3);
    CHECK(ber.overall == Overall::Fail);

    o.unconditional = {{"(x,y)", [](std::span<const double> v) { return v[0]; },
                        [](std::span<const double> v) { return v[1]; }}};
    o.history_grid = Grid::uniform(0.1, 0.6, 3);
    o.t_grid = kUnitT;
    auto minimal = check_cassoc_conditions(as_process(uniform_model(KijimaI{}, DeterministicConstant{1.0})), T, o);
    CHECK(minimal.overall == Overall::Fail);
    REQUIRE(minimal.find("c:assoc(x,y)") != nullptr);
    CHECK(minimal.find("c:assoc(x,y)")->status == Status::Violated);
}

TEST_CASE("association oracle: minimal-repair uniform covariance is -1/24") {
    const auto process = as_process(uniform_model(KijimaI{}, DeterministicConstant{1.0}));
    VectorSampler x12 = [&](RngStream& rng) { return process.sample(2, rng); };
    auto est = empirical_association(x12, [](std::span<const double> v) { return v[0]; },
                                     [](std::span<const double> v) { return v[1]; }, 400000, 5);
    CHECK(std::abs(est.cov + 1.0 / 24.0) < 3.0 * est.se);
}

TEST_CASE("prcon conclusion follows from its hypotheses") {
    // Models passing the prcon hypothesis with a DFR T.
    const std::vector<VirtualAgeModel> models{
        uniform_model(KijimaI{}, DeterministicConstant{1.0}),
        {weibull(2.0, 1.0), KijimaI{}, DeterministicConstant{0.5}},
        {weibull(3.0, 2.0), KijimaII{}, DeterministicConstant{0.8}},
        {exponential(1.0), KijimaI{}, DeterministicConstant{0.0}},
    };
    const std::vector<RandomTime> times{{exponential(1.0), std::nullopt}, {gamma(0.5, 1.0), std::nullopt},
                                        {weibull(0.7, 1.0), std::nullopt}};
    for (const auto& m : models) {
        REQUIRE(check_prcon_hypothesis(m.base, induced_kernel(m, 1), Grid::quantile_based(m.base, 8), kT).overall ==
                Overall::Pass);
        for (const auto& T : times) {
            REQUIRE(check_aging_class(T.law, AgingMode::DFR, kT).status == Status::Holds);
            const auto c = prcon_conclusion(as_process(m), T);
            CHECK(c.holds);
            CHECK(c.lhs <= c.rhs + 1e-8);
        }
    }
}

TEST_CASE("report json carries labels and witnesses") {
    const auto restart = uniform_model(KijimaII{}, DeterministicSequence{{1.0, 0.0}});
    auto r = check_t2star_conditions(restart, 1, Grid::uniform(0.1, 0.8, 4), kUnitT);
    const auto j = to_json(r);
    CHECK(j["overall"] == "FAIL");
    bool found = false;
    for (const auto& c : j["conditions"]) {
        if (c["label"] == "c.2[n=1]") {
            found = true;
            CHECK(c["verdict"] == "VIOLATED");
            CHECK_FALSE(c["witness"].empty());
        }
    }
    CHECK(found);
}
