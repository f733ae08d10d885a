#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfrkit/estimate.hpp"
#include "dfrkit/kernels.hpp"
#include "dfrkit/vamodels.hpp"

namespace dfr {

struct NamedConstant {
    std::string name;
    double value = 0.0;
    std::string derivation;  ///< "series", "quadrature", "closed-form" or "product"
};

struct McComparison {
    std::string name;
    double exact = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    bool within_3se = false;
};

struct CounterexampleReport {
    std::string name;
    std::vector<NamedConstant> constants;
    std::vector<MarginEntry> margins;
    std::string claim;
    /// VIOLATED when the counterexample refutes the claim, INCONCLUSIVE otherwise.
    Status claim_verdict = Status::Inconclusive;
    std::vector<McComparison> replication;
    std::vector<std::string> notes;

    const NamedConstant* find(const std::string& name) const;
};

nlohmann::json to_json(const CounterexampleReport& report);
void write_table(std::ostream& os, const CounterexampleReport& report);

/// Kijima type II, base Uniform(0,1), degrees (1, 0, 0, ...).
VirtualAgeModel kijima2_uniform_model();

/// Survival constants of the Kijima II restart model stopped at an
/// Exponential(1) time, from two independent routes for p_2 (series and
/// quadrature, cross-checked to `tol`), with the two log-convexity margins.
/// When `replicate` is set, the same model is also estimated by Monte Carlo.
CounterexampleReport kijima2_restart(double tol, const std::optional<McOptions>& replicate = std::nullopt);

/// sum_{k>=1} 1/(k k!) = int_0^1 (e^t - 1)/t dt.
double exponential_integral_series();

/// Inter-renewal process X_1 = Y, X_2 = W_1, X_n = W_{n-1}/Y (n >= 3) with
/// Y = 1 + Bernoulli(p).
CountingProcess ber_scaled_process(double p, const Lifetime& w);

/// Cov(X_1, X_3) = -E[W] p (1-p) / 2 in the process above.
double ber_scaled_covariance(double p, double mean_w);

/// Analytic vs empirical Cov(X_1, X_3); refuted when the empirical value is
/// significantly negative (below -3 se) and within 3 se of the analytic one.
CounterexampleReport ber_scaled_association(double p, const Lifetime& w, std::size_t n, std::uint64_t seed);

}  // namespace dfr
