#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "dfrkit/errors.hpp"
#include "dfrkit/stats.hpp"
#include "dfrkit/survival.hpp"
#include "dfrkit/vamodels.hpp"

using namespace dfr;

TEST_CASE("virtual age steps") {
    CHECK(step_virtual_age(KijimaI{}, 2.0, 1.0, 0.5) == 2.5);
    CHECK(step_virtual_age(KijimaII{}, 2.0, 1.0, 0.0) == 0.0);
    CHECK(step_virtual_age(KijimaI{}, 2.0, 1.0, 1.0) == 3.0);
    CHECK(step_virtual_age(KijimaII{}, 2.0, 1.0, 1.0) == 3.0);
    CHECK_THROWS_AS(step_virtual_age(KijimaI{}, -1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(step_virtual_age(KijimaI{}, 1.0, 1.0, -0.1), DomainError);
    CustomRule half{"half", [](double v, double x, double a) { return 0.5 * (v + a * x); }};
    CHECK(step_virtual_age(half, 2.0, 2.0, 1.0) == 2.0);
    CustomRule bad{"bad", [](double, double, double) { return -1.0; }};
    CHECK_THROWS_AS(step_virtual_age(bad, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("repair policies") {
    CHECK(degree_at(DeterministicConstant{0.3}, 5) == 0.3);
    const RepairPolicy seq = DeterministicSequence{{1.0, 0.0}};
    CHECK(degree_at(seq, 1) == 1.0);
    CHECK(degree_at(seq, 2) == 0.0);
    CHECK(degree_at(seq, 9) == 0.0);
    CHECK_THROWS_AS(degree_at(IidRandom{uniform_zero_to(1.0)}, 1), UnsupportedError);
    CHECK(allows_worse_repair(DeterministicConstant{1.5}));
    CHECK_FALSE(allows_worse_repair(seq));
}

TEST_CASE("next interarrival law") {
    const VirtualAgeModel u{uniform_zero_to(1.0), KijimaII{}, DeterministicConstant{1.0}};
    const Grid g = Grid::uniform(0.0, 2.0, 41);
    CHECK(st_compare(next_interarrival_survival(u, 0.0), u.base, g).order == Order::EQ);
    for (double x1 : {0.1, 0.5, 0.9}) {
        CHECK(st_compare(next_interarrival_survival(u, x1), uniform_zero_to(1.0 - x1), g).order == Order::EQ);
    }
    const VirtualAgeModel e{exponential(2.0), KijimaI{}, DeterministicConstant{0.5}};
    for (double v : {0.0, 1.0, 7.0}) {
        CHECK(st_compare(next_interarrival_survival(e, v), exponential(2.0), g).order == Order::EQ);
    }
    // Beyond the support the next interarrival is 0.
    CHECK(next_interarrival_survival(u, 1.5).survival(0.0) == 0.0);
}

TEST_CASE("trajectory invariants") {
    const std::vector<VirtualAgeModel> models{
        {weibull(2.0, 1.0), KijimaI{}, DeterministicConstant{0.4}},
        {weibull(2.0, 1.0), KijimaII{}, DeterministicConstant{0.7}},
        {gamma(0.5, 1.0), KijimaI{}, IidRandom{uniform_zero_to(1.0)}},
        {uniform_zero_to(1.0), KijimaII{}, DeterministicSequence{{1.0, 0.0}}},
        {uniform_zero_to(1.0), KijimaI{}, DeterministicConstant{1.0}},
    };
    for (const auto& m : models) {
        CAPTURE(describe(m.rule));
        for (int i = 0; i < 500; ++i) {
            RngStream rng(3, i);
            const auto t = sample_trajectory(m, 8, rng);
            REQUIRE(t.x.size() == 8);
            REQUIRE(t.a.size() == 8);
            REQUIRE(t.v.size() == 9);
            REQUIRE(t.s.size() == 9);
            CHECK(t.s[0] == 0.0);
            CHECK(t.v[0] == 0.0);
            for (std::size_t k = 1; k <= 8; ++k) {
                CHECK(t.x[k - 1] >= 0.0);
                CHECK(t.a[k - 1] >= 0.0);
                CHECK(t.s[k] == t.s[k - 1] + t.x[k - 1]);
                CHECK(t.v[k] == step_virtual_age(m.rule, t.v[k - 1], t.x[k - 1], t.a[k - 1]));
                if (std::holds_alternative<KijimaI>(m.rule)) CHECK(t.v[k] >= t.v[k - 1]);
            }
            // Arrival-only sampler consumes the same draws.
            RngStream again(3, i);
            std::vector<double> arrivals(9);
            sample_arrivals(m, arrivals, again);
            CHECK(arrivals == t.s);
        }
    }
}

TEST_CASE("minimal repair gives V = S and bounded arrivals") {
    const VirtualAgeModel m{uniform_zero_to(1.0), KijimaI{}, DeterministicConstant{1.0}};
    int violations = 0;
    for (int i = 0; i < 20000; ++i) {
        RngStream rng(12, i);
        const auto t = sample_trajectory(m, 10, rng);
        for (std::size_t k = 0; k <= 10; ++k) {
            if (std::abs(t.v[k] - t.s[k]) > 1e-12 || t.s[k] >= 1.0) ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("Kijima II restart: zero degree resets age and X3 has the base law") {
    const VirtualAgeModel m{uniform_zero_to(1.0), KijimaII{}, DeterministicSequence{{1.0, 0.0}}};
    std::vector<double> x3;
    for (int i = 0; i < 50000; ++i) {
        RngStream rng(21, i);
        const auto t = sample_trajectory(m, 3, rng);
        CHECK(t.v[2] == 0.0);
        x3.push_back(t.x[2]);
    }
    CHECK(ks_one_sample(x3, [](double z) { return z <= 0 ? 1.0 : z >= 1 ? 0.0 : 1.0 - z; }, 0.01).pass);
}

TEST_CASE("perfect repair is a renewal process") {
    const VirtualAgeModel m{weibull(2.0, 1.0), KijimaI{}, DeterministicConstant{0.0}};
    std::vector<double> x2;
    for (int i = 0; i < 100000; ++i) {
        RngStream rng(31, i);
        x2.push_back(sample_trajectory(m, 2, rng).x[1]);
    }
    CHECK(ks_one_sample(x2, [](double z) { return z <= 0 ? 1.0 : std::exp(-z * z); }, 0.01).pass);

    const VirtualAgeModel u{uniform_zero_to(1.0), KijimaI{}, DeterministicConstant{0.0}};
    const int n = 1000000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream rng(32, i);
        std::vector<double> arrivals(2);
        sample_arrivals(u, arrivals, rng);
        s += arrivals[1];
    }
    CHECK(std::abs(s / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("absorbing virtual age") {
    // Worse-than-minimal repair can push the age past the uniform support.
    const VirtualAgeModel m{uniform_zero_to(1.0), KijimaII{}, DeterministicConstant{3.0}};
    int absorbed = 0;
    for (int i = 0; i < 1000; ++i) {
        RngStream rng(4, i);
        const auto t = sample_trajectory(m, 6, rng);
        if (t.absorbed_at) {
            ++absorbed;
            for (std::size_t k = *t.absorbed_at; k < 6; ++k) CHECK(t.x[k] == 0.0);
        }
    }
    CHECK(absorbed > 0);
}

TEST_CASE("induced kernels") {
    const Grid g = Grid::uniform(0.0, 2.0, 81);
    const VirtualAgeModel perfect{gamma(2.0, 1.0), KijimaI{}, DeterministicConstant{0.0}};
    const std::vector<double> h{0.3, 1.7};
    CHECK(st_compare(induced_kernel(perfect, 2).at(h), perfect.base, g).order == Order::EQ);

    const VirtualAgeModel minimal{uniform_zero_to(1.0), KijimaI{}, DeterministicConstant{1.0}};
    const std::vector<double> x{0.3, 0.2};
    const auto law = induced_kernel(minimal, 2).at(x);
    for (double z : {0.0, 0.1, 0.25, 0.4, 0.5, 0.7}) {
        CHECK(law.survival(z) == doctest::Approx(std::max(0.0, (0.5 - z) / 0.5)).epsilon(1e-12));
    }

    const VirtualAgeModel seq{uniform_zero_to(1.0), KijimaI{}, DeterministicSequence{{1.0, 0.0}}};
    CHECK(virtual_age_after(seq, x) == doctest::Approx(0.3));
    const auto law2 = induced_kernel(seq, 2).at(x);
    for (double z : {0.0, 0.2, 0.5, 0.7}) {
        CHECK(law2.survival(z) == doctest::Approx(std::max(0.0, (0.7 - z) / 0.7)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(induced_kernel({uniform_zero_to(1.0), KijimaI{}, IidRandom{uniform_zero_to(1.0)}}, 1),
                    UnsupportedError);
    const std::vector<double> outside{0.8, 0.5};
    CHECK_FALSE(induced_kernel(minimal, 2).contains(outside));
}

TEST_CASE("IFR base gives kernels decreasing along histories") {
    const VirtualAgeModel m{weibull(2.0, 1.0), KijimaI{}, DeterministicConstant{0.7}};
    const Grid t = Grid::uniform(0.0, 4.0, 41);
    const Grid h = Grid::quantile_based(m.base, 6);
    for (double x1 : h.points()) {
        for (double x2 : h.points()) {
            const std::vector<double> a{x1};
            const std::vector<double> b{x1, x2};
            CHECK(is_st_le(st_compare(induced_kernel(m, 2).at(b), induced_kernel(m, 1).at(a), t).order));
        }
    }
}

TEST_CASE("trajectory csv") {
    const VirtualAgeModel m{exponential(1.0), KijimaI{}, DeterministicConstant{0.5}};
    RngStream rng(1, 0);
    const auto t = sample_trajectory(m, 2, rng);
    std::ostringstream os;
    write_trajectory_csv_header(os);
    write_trajectory_csv(os, t, 0, 1);
    const std::string s = os.str();
    CHECK(s.rfind("trajectory_id,n,x,a,v,s,seed\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 3);
}
