#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfrkit/survival.hpp"
#include "dfrkit/vamodels.hpp"

namespace dfr {

/// The independent stopping time T.
struct RandomTime {
    Lifetime law;
    std::optional<ClassVerdict> dfr_claim;
};

enum class EstimateKind { MonteCarlo, Quadrature, ClosedForm };
std::string_view to_string(EstimateKind k);

struct EstimateMeta {
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    std::size_t chunk_size = 0;
    double tol = 0.0;
    std::vector<std::string> warnings;
};

/// p[n] estimates P(N(T) >= n) for n = 0..n_max with p[0] = 1.
struct SurvivalSequenceEstimate {
    std::vector<double> p;
    std::vector<double> se;
    /// Covariance of the per-trajectory values S_T(S_n), row-major
    /// (n_max+1)^2; empty for exact kinds.
    std::vector<double> cov;
    EstimateKind kind = EstimateKind::ClosedForm;
    EstimateMeta meta;

    std::size_t n_max() const { return p.empty() ? 0 : p.size() - 1; }
    double covariance(std::size_t i, std::size_t j) const { return cov.empty() ? 0.0 : cov[i * p.size() + j]; }
};

struct McOptions {
    std::size_t n_samples = 100000;
    std::uint64_t seed = 1;
    std::size_t chunk_size = 4096;
    /// Worker threads; 0 means hardware concurrency. Does not affect results.
    std::size_t threads = 0;
};

/// Fills arrivals S_0..S_n (size n+1) for one trajectory.
using ArrivalSampler = std::function<void(std::span<double>, RngStream&)>;

/// Common-random-numbers estimator: trajectory i uses stream (seed, i) and
/// contributes S_T(S_n) for every n at once. Chunk partial moments are merged
/// by a fixed pairwise tree, so output depends only on (seed, n_samples,
/// chunk_size).
SurvivalSequenceEstimate estimate_sequence_mc(const ArrivalSampler& sampler, const RandomTime& T, std::size_t n_max,
                                              const McOptions& options);
SurvivalSequenceEstimate estimate_sequence_mc(const VirtualAgeModel& model, const RandomTime& T, std::size_t n_max,
                                              const McOptions& options);

/// Iterated adaptive quadrature of E[S_T(S_n)] over the conditional chain,
/// n_max <= 3, deterministic policy, closed-form base law.
SurvivalSequenceEstimate estimate_sequence_quadrature(const VirtualAgeModel& model, const RandomTime& T,
                                                      std::size_t n_max, double tol = 1e-9);

/// Poisson(lambda) arrivals stopped at T ~ Exponential(mu): p_n = (lambda/(lambda+mu))^n.
SurvivalSequenceEstimate closed_form_poisson_exp(double lambda, double mu, std::size_t n_max);

/// Warning text if T and X_1 both carry an atom at 0, else nullopt.
std::optional<std::string> common_atom_warning(const Lifetime& first_interarrival, const RandomTime& T);

struct MarginEntry {
    std::size_t n = 0;
    double margin = 0.0;     ///< p_n p_{n+2} - p_{n+1}^2
    double margin_se = 0.0;  ///< delta-method standard error (0 for exact kinds)
    Status verdict = Status::Inconclusive;
};

struct LogConvexityReport {
    std::vector<MarginEntry> entries;
    EstimateKind kind = EstimateKind::ClosedForm;
    double alpha = 0.01;
    /// Critical z used for Monte Carlo verdicts (Bonferroni over margins);
    /// for exact kinds, the absolute tolerance used instead.
    double threshold = 0.0;
    std::uint64_t seed = 0;

    bool any_violated() const;
};

/// Discrete DFR (log-convexity) check of an estimated survival sequence.
/// Exact kinds: VIOLATED iff margin < -tolerance, else HOLDS. Monte Carlo:
/// VIOLATED iff margin < -z*se, HOLDS iff margin > z*se, else INCONCLUSIVE,
/// with z = Phi^{-1}(1 - alpha/(2K)) over the K margins.
LogConvexityReport check_discrete_dfr(const SurvivalSequenceEstimate& est, double alpha = 0.01);

void write_estimate_csv(std::ostream& os, const SurvivalSequenceEstimate& est);
void write_report_csv(std::ostream& os, const LogConvexityReport& report);

}  // namespace dfr
