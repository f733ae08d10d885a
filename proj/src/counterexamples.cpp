#include "dfrkit/counterexamples.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dfrkit/errors.hpp"
#include "dfrkit/format.hpp"
#include "dfrkit/hypotheses.hpp"
#include "dfrkit/quadrature.hpp"

namespace dfr {

const NamedConstant* CounterexampleReport::find(const std::string& key) const {
    for (const auto& c : constants) {
        if (c.name == key) return &c;
    }
    return nullptr;
}

nlohmann::json to_json(const CounterexampleReport& report) {
    nlohmann::json j;
    j["name"] = report.name;
    j["claim"] = report.claim;
    j["claim_verdict"] = std::string(to_string(report.claim_verdict));
    j["constants"] = nlohmann::json::array();
    for (const auto& c : report.constants) {
        j["constants"].push_back({{"name", c.name}, {"value", c.value}, {"derivation", c.derivation}});
    }
    j["margins"] = nlohmann::json::array();
    for (const auto& m : report.margins) {
        j["margins"].push_back({{"n", m.n}, {"margin", m.margin}, {"margin_se", m.margin_se},
                                {"verdict", std::string(to_string(m.verdict))}});
    }
    j["replication"] = nlohmann::json::array();
    for (const auto& r : report.replication) {
        j["replication"].push_back({{"name", r.name},
                                    {"exact", r.exact},
                                    {"estimate", r.estimate},
                                    {"se", r.se},
                                    {"within_3se", r.within_3se}});
    }
    j["notes"] = report.notes;
    return j;
}

void write_table(std::ostream& os, const CounterexampleReport& report) {
    os << report.name << '\n';
    os << std::left << std::setw(22) << "constant" << std::setw(26) << "value" << "derivation\n";
    for (const auto& c : report.constants) {
        os << std::setw(22) << c.name << std::setw(26) << format_double(c.value) << c.derivation << '\n';
    }
    if (!report.margins.empty()) {
        os << std::setw(22) << "margin n" << std::setw(26) << "value" << "verdict\n";
        for (const auto& m : report.margins) {
            os << std::setw(22) << m.n << std::setw(26) << format_double(m.margin) << to_string(m.verdict) << '\n';
        }
    }
    for (const auto& r : report.replication) {
        os << std::setw(22) << ("MC " + r.name) << std::setw(26) << format_double(r.estimate)
           << "se=" << format_double(r.se) << (r.within_3se ? " (within 3 se)" : " (outside 3 se)") << '\n';
    }
    os << "claim: " << report.claim << " -> " << to_string(report.claim_verdict) << '\n';
    for (const auto& n : report.notes) os << "note: " << n << '\n';
    os << std::right;
}

VirtualAgeModel kijima2_uniform_model() {
    return VirtualAgeModel{uniform_zero_to(1.0), KijimaII{}, DeterministicSequence{{1.0, 0.0}}};
}

double exponential_integral_series() {
    double sum = 0.0;
    double factorial = 1.0;
    for (int k = 1; k < 40; ++k) {
        factorial *= k;
        const double term = 1.0 / (k * factorial);
        sum += term;
        if (term < 1e-18) break;
    }
    return sum;
}

namespace {

/// (1 - e^{-w}) / w with its Taylor expansion near the removable singularity.
double restart_factor(double w) {
    if (w < 1e-4) return 1.0 - w / 2.0 + w * w / 6.0 - w * w * w / 24.0;
    return -std::expm1(-w) / w;
}

}  // namespace

CounterexampleReport kijima2_restart(double tol, const std::optional<McOptions>& replicate) {
    if (!(tol > 0.0 && tol <= 1e-4)) throw DomainError("kijima2_restart: tol must lie in (0, 1e-4]");

    const double inv_e = std::exp(-1.0);
    const double p1 = -std::expm1(-1.0);
    const double p2_series = inv_e * exponential_integral_series();
    // E[e^{-(X1+X2)}] = int_0^1 e^{-x1} (1 - e^{-(1-x1)}) / (1 - x1) dx1
    const auto quad = integrate_adaptive([](double x1) { return std::exp(-x1) * restart_factor(1.0 - x1); }, 0.0, 1.0,
                                         0.01 * tol);
    const double p2_quad = quad.value;
    if (std::abs(p2_series - p2_quad) > tol) {
        std::ostringstream os;
        os << "kijima2_restart: series " << p2_series << " and quadrature " << p2_quad << " disagree beyond " << tol;
        throw ConsistencyError(os.str());
    }
    const double p2 = p2_series;
    const double p3 = p1 * p2;  // X_3 restarts as new and is independent of (X_1, X_2)

    CounterexampleReport r;
    r.name = "Kijima II, Uniform(0,1) base, degrees (1,0,...), T ~ Exponential(1)";
    r.constants = {{"p1", p1, "closed-form"},
                   {"p2", p2, "series"},
                   {"p2_quadrature", p2_quad, "quadrature"},
                   {"p3", p3, "product"},
                   {"p1_squared", p1 * p1, "product"}};

    MarginEntry m0{0, p2 - p1 * p1, 0.0, Status::Holds};
    m0.verdict = m0.margin >= 0.0 ? Status::Holds : Status::Violated;
    MarginEntry m1{1, p1 * p3 - p2 * p2, 0.0, Status::Holds};
    m1.verdict = m1.margin >= 0.0 ? Status::Holds : Status::Violated;
    r.margins = {m0, m1};
    r.claim = "N(T) is discrete DFR";
    r.claim_verdict = m1.verdict == Status::Violated ? Status::Violated : Status::Inconclusive;
    r.notes.push_back("margin n compares levels n, n+1, n+2 of P(N(T) >= n)");

    if (replicate) {
        const auto est = estimate_sequence_mc(kijima2_uniform_model(), RandomTime{exponential(1.0), std::nullopt}, 3,
                                              *replicate);
        const double exact[4] = {1.0, p1, p2, p3};
        for (std::size_t n = 1; n <= 3; ++n) {
            McComparison c;
            c.name = "p" + std::to_string(n);
            c.exact = exact[n];
            c.estimate = est.p[n];
            c.se = est.se[n];
            c.within_3se = std::abs(c.estimate - c.exact) <= 3.0 * c.se;
            r.replication.push_back(c);
        }
    }
    return r;
}

CountingProcess ber_scaled_process(double p, const Lifetime& w) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("ber_scaled_process: p must lie in (0,1)");
    const Lifetime y = discrete({1.0, 2.0}, {1.0 - p, p});
    CountingProcess proc;
    proc.name = "X1 = 1+Ber(" + format_double(p) + "), X2 = W, Xn = W/X1";
    proc.kernel = [y, w](std::size_t n) {
        if (n == 0) return HistoryKernel::constant(0, y);
        if (n == 1) {
            HistoryKernel k = HistoryKernel::constant(1, w);
            k.domain = [](History x) { return x[0] >= 1.0; };
            return k;
        }
        HistoryKernel k;
        k.arity = n;
        k.domain = [](History x) { return x[0] >= 1.0; };
        k.law = [w](History x) { return scaled(w, 1.0 / x[0]); };
        return k;
    };
    return proc;
}

double ber_scaled_covariance(double p, double mean_w) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("ber_scaled_covariance: p must lie in (0,1)");
    return mean_w * (1.0 - (1.0 + p) * (1.0 - 0.5 * p));
}

CounterexampleReport ber_scaled_association(double p, const Lifetime& w, std::size_t n, std::uint64_t seed) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("ber_scaled_association: p must lie in (0,1)");
    const double mean_w = w.mean();
    if (!(mean_w > 0.0) || !std::isfinite(mean_w)) throw DomainError("ber_scaled_association: W needs a finite positive mean");

    const double analytic = ber_scaled_covariance(p, mean_w);
    const Lifetime y = discrete({1.0, 2.0}, {1.0 - p, p});
    const VectorSampler sampler = [y, w](RngStream& rng) {
        const double yy = y.sample(rng);
        const double ww = w.sample(rng);
        return std::vector<double>{yy, ww / yy};
    };
    const auto first = [](std::span<const double> v) { return v[0]; };
    const auto third = [](std::span<const double> v) { return v[1]; };
    const AssociationEstimate est = empirical_association(sampler, first, third, n, seed);

    CounterexampleReport r;
    r.name = "Y = 1+Ber(" + format_double(p) + "), W ~ " + w.describe() + ": Cov(X1, X3)";
    r.constants = {{"E[W]", mean_w, "closed-form"},
                   {"cov_analytic", analytic, "closed-form"},
                   {"cov_empirical", est.cov, "monte-carlo"},
                   {"cov_se", est.se, "monte-carlo"}};
    r.claim = "(X1, X3) is associated";
    const bool significant = est.cov < -3.0 * est.se;
    const bool consistent = std::abs(est.cov - analytic) <= 3.0 * est.se;
    if (significant && consistent && analytic < 0.0) {
        r.claim_verdict = Status::Violated;
    } else {
        r.claim_verdict = Status::Inconclusive;
        if (significant && !consistent) r.notes.push_back("empirical covariance negative but far from analytic value");
    }
    r.notes.push_back("n = " + std::to_string(n) + ", seed = " + std::to_string(seed));
    return r;
}

}  // namespace dfr
