#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfrkit/lifetime.hpp"

namespace dfr {

/// Survival values below this are treated as zero in ratio comparisons.
inline constexpr double kSurvivalFloor = 1e-12;
/// Relative tolerance for aging-class ratio comparisons.
inline constexpr double kRatioTolerance = 1e-9;
/// Absolute tolerance for pointwise survival dominance.
inline constexpr double kOrderTolerance = 1e-9;

enum class GridPolicy { Uniform, LogSpaced, QuantileBased, Explicit };

/// Strictly increasing, nonnegative evaluation points (at least two).
class Grid {
public:
    explicit Grid(std::vector<double> points, GridPolicy policy = GridPolicy::Explicit);

    static Grid uniform(double lo, double hi, std::size_t count);
    /// Geometric spacing on [lo, hi]; lo must be positive.
    static Grid log_spaced(double lo, double hi, std::size_t count);
    /// Quantiles of `law` at survival levels 1 - (i + 1/2)/count; duplicates dropped.
    static Grid quantile_based(const Lifetime& law, std::size_t count);

    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    GridPolicy policy() const { return policy_; }

private:
    std::vector<double> points_;
    GridPolicy policy_;
};

enum class Status { Holds, Violated, Inconclusive };
std::string_view to_string(Status s);

enum class AgingMode { DFR, IFR, NWU };
std::string_view to_string(AgingMode m);

/// Location of a failed aging inequality. For DFR/IFR the ratios at t1 < t2
/// are compared; for NWU t2 equals t1 and the pair is (z, t1).
struct AgingWitness {
    double z = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double margin = 0.0;  ///< amount by which the inequality fails (> 0)
};

/// Grid verdicts are refutation-complete only: HOLDS means no violation was
/// found among the grid points, not a proof of the class property.
struct ClassVerdict {
    Status status = Status::Inconclusive;
    std::optional<AgingWitness> witness;
    std::string note;
};

enum class Order { LE, GE, EQ, Incomparable };
std::string_view to_string(Order o);
Order reversed(Order o);
/// True for LE and EQ, i.e. the non-strict x <=_st y.
inline bool is_st_le(Order o) { return o == Order::LE || o == Order::EQ; }

struct OrderWitness {
    double t = 0.0;
    double survival_x = 0.0;
    double survival_y = 0.0;
};

struct OrderVerdict {
    Order order = Order::EQ;
    std::optional<OrderWitness> x_above;  ///< a point where S_x > S_y + tol
    std::optional<OrderWitness> y_above;  ///< a point where S_y > S_x + tol
};

/// Survival of a unit of virtual age v: S(v+z)/S(v), or 0 when S(v) = 0.
double conditional_survival(const Lifetime& base, double age, double z);

ClassVerdict check_aging_class(const Lifetime& x, AgingMode mode, const Grid& grid,
                               double rel_tol = kRatioTolerance);

OrderVerdict st_compare(const Lifetime& x, const Lifetime& y, const Grid& grid, double tol = kOrderTolerance);

/// Pointwise comparison of two survival curves already sampled on `grid`.
OrderVerdict st_compare_values(const std::vector<double>& survival_x, const std::vector<double>& survival_y,
                               const Grid& grid, double tol = kOrderTolerance);

/// Smallest t with survival(t) <= u; u in (0,1].
double quantile_invert(const Lifetime& x, double u);

}  // namespace dfr
