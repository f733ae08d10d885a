#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dfrkit/estimate.hpp"
#include "dfrkit/kernels.hpp"
#include "dfrkit/survival.hpp"
#include "dfrkit/vamodels.hpp"

namespace dfr {

struct Condition {
    std::string label;
    Status status = Status::Inconclusive;
    std::string detail;
    /// Named values locating a failure (grid point, survival values, margin).
    std::vector<std::pair<std::string, double>> witness;
};

enum class Overall { Pass, Fail, Partial };
std::string_view to_string(Overall o);

/// Overall is FAIL if any condition is VIOLATED, PARTIAL if none is but some
/// are INCONCLUSIVE, PASS otherwise.
struct HypothesisReport {
    std::string subject;
    std::vector<Condition> conditions;
    std::vector<std::string> notes;
    Overall overall = Overall::Pass;

    void add(Condition c);
    const Condition* find(std::string_view label) const;
};

nlohmann::json to_json(const HypothesisReport& report);

/// Z_2^{x1} <=_st X_1 for every grid x1 in the kernel's domain.
HypothesisReport check_prcon_hypothesis(const Lifetime& x1, const HistoryKernel& k, const Grid& x1_grid,
                                        const Grid& t_grid);

/// Conditions c.1 (Z_2^{x1} <=_st X_1) and c.2 (Z_{n+2}^{(x,x_{n+1})} <=_st
/// Z_{n+1}^x) on grid histories of length n = 1..depth. Every coordinate of a
/// history ranges over `history_grid`. Random policies are unsupported.
HypothesisReport check_t2star_conditions(const VirtualAgeModel& model, std::size_t depth, const Grid& history_grid,
                                         const Grid& t_grid);

/// (a) T DFR, (b) base IFR with no atom at 0, plus the degree-independence
/// flag. Throws std::invalid_argument unless the rule is Kijima type I.
HypothesisReport check_kijima1_conditions(const VirtualAgeModel& model, const RandomTime& T, const Grid& grid);

using VectorSampler = std::function<std::vector<double>(RngStream&)>;
using VectorFunction = std::function<double(std::span<const double>)>;

struct AssociationEstimate {
    double cov = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

/// Sample covariance of f and g over n draws (stream (seed, i) per draw) with
/// a plug-in standard error. A significantly negative value refutes
/// association; a nonnegative one proves nothing.
AssociationEstimate empirical_association(const VectorSampler& sampler, const VectorFunction& f,
                                          const VectorFunction& g, std::size_t n, std::uint64_t seed);

/// True when cov < -z se with z = Phi^{-1}(1 - alpha).
bool association_refuted(const AssociationEstimate& est, double alpha);

struct FunctionPair {
    std::string label;
    VectorFunction f;
    VectorFunction g;
};

/// Projections, sum and product pairs on a two-dimensional vector.
std::vector<FunctionPair> default_pair_battery();

struct CassocOptions {
    /// Increasing function pairs on (X_1, ..., X_dims).
    std::vector<FunctionPair> unconditional;
    std::size_t unconditional_dims = 2;
    /// Increasing function pairs on (Z_{n+1}^x, Z_{n+2}^x).
    std::vector<FunctionPair> conditional;
    Grid history_grid = Grid::uniform(0.0, 1.0, 8);
    Grid t_grid = Grid::uniform(0.0, 5.0, 50);
    std::size_t depth = 1;
    std::size_t samples = 100000;
    std::size_t conditional_samples = 20000;
    double alpha = 0.001;
    std::uint64_t seed = 1;
};

/// Conditions of the association route: T DFR, no common atom at 0,
/// (X_1, X_2) not refuted as associated with X_2 <=_st X_1, and the same at
/// the kernel level on grid histories. Association can only be refuted, so a
/// clean run is PARTIAL, never PASS.
HypothesisReport check_cassoc_conditions(const CountingProcess& process, const RandomTime& T,
                                         const CassocOptions& options);

struct PrconConclusion {
    double lhs = 0.0;  ///< E^2[S_T(X_1)]
    double rhs = 0.0;  ///< E[S_T(X_1 + X_2)] S_T(0)
    bool holds = false;
};

/// The two-interarrival inequality E^2[S_T(X1)] <= E[S_T(X1+X2)] S_T(0),
/// evaluated by quadrature on the process kernels.
PrconConclusion prcon_conclusion(const CountingProcess& process, const RandomTime& T, double tol = 1e-9);

}  // namespace dfr
