#include "dfrkit/survival.hpp"

#include <algorithm>
#include <cmath>

#include "dfrkit/errors.hpp"

namespace dfr {

Grid::Grid(std::vector<double> points, GridPolicy policy) : points_(std::move(points)), policy_(policy) {
    if (points_.size() < 2) throw DomainError("grid too small: need at least two points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!(points_[i] >= 0.0) || !std::isfinite(points_[i])) {
            throw DomainError("grid points must be finite and nonnegative");
        }
        if (i > 0 && !(points_[i] > points_[i - 1])) throw DomainError("grid points must be strictly increasing");
    }
}

Grid Grid::uniform(double lo, double hi, std::size_t count) {
    if (count < 2) throw DomainError("grid too small: need at least two points");
    if (!(hi > lo)) throw DomainError("uniform grid needs hi > lo");
    std::vector<double> pts(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) pts[i] = lo + step * static_cast<double>(i);
    pts.back() = hi;
    return Grid(std::move(pts), GridPolicy::Uniform);
}

Grid Grid::log_spaced(double lo, double hi, std::size_t count) {
    if (count < 2) throw DomainError("grid too small: need at least two points");
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("log-spaced grid needs 0 < lo < hi");
    std::vector<double> pts(count);
    const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) pts[i] = lo * std::exp(ratio * static_cast<double>(i));
    pts.front() = lo;
    pts.back() = hi;
    return Grid(std::move(pts), GridPolicy::LogSpaced);
}

Grid Grid::quantile_based(const Lifetime& law, std::size_t count) {
    if (count < 2) throw DomainError("grid too small: need at least two points");
    std::vector<double> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double level = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        pts.push_back(law.quantile(level));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return Grid(std::move(pts), GridPolicy::QuantileBased);
}

std::string_view to_string(Status s) {
    switch (s) {
        case Status::Holds: return "HOLDS";
        case Status::Violated: return "VIOLATED";
        case Status::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

std::string_view to_string(AgingMode m) {
    switch (m) {
        case AgingMode::DFR: return "DFR";
        case AgingMode::IFR: return "IFR";
        case AgingMode::NWU: return "NWU";
    }
    return "?";
}

std::string_view to_string(Order o) {
    switch (o) {
        case Order::LE: return "LE";
        case Order::GE: return "GE";
        case Order::EQ: return "EQ";
        case Order::Incomparable: return "INCOMPARABLE";
    }
    return "?";
}

Order reversed(Order o) {
    switch (o) {
        case Order::LE: return Order::GE;
        case Order::GE: return Order::LE;
        default: return o;
    }
}

double conditional_survival(const Lifetime& base, double age, double z) {
    if (!(age >= 0.0) || !(z >= 0.0)) throw DomainError("conditional_survival: age and z must be nonnegative");
    const double at_age = base.survival(age);
    if (!(at_age > 0.0)) return 0.0;
    return std::clamp(base.survival(age + z) / at_age, 0.0, 1.0);
}

namespace {

double floored(double s) { return s < kSurvivalFloor ? 0.0 : s; }

}  // namespace

ClassVerdict check_aging_class(const Lifetime& x, AgingMode mode, const Grid& grid, double rel_tol) {
    const auto& pts = grid.points();
    const std::size_t n = pts.size();
    std::vector<double> at(n);
    // Only denominators are floored; numerators keep their full relative
    // accuracy so exponential tails do not fake a violation.
    for (std::size_t i = 0; i < n; ++i) at[i] = floored(x.survival(pts[i]));
    // sums[i][j] = S(pts[i] + pts[j])
    std::vector<double> sums(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sums[i * n + j] = x.survival(pts[i] + pts[j]);
    }

    ClassVerdict verdict;
    verdict.status = Status::Holds;
    verdict.note = "no violation on a " + std::to_string(n) + "-point grid (grid check is necessary, not sufficient)";

    if (mode == AgingMode::NWU) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double lhs = at[i] * at[j];
                const double rhs = sums[i * n + j];
                const double gap = lhs - rhs;
                if (gap > rel_tol * std::max(lhs, rhs) && gap > kSurvivalFloor) {
                    verdict.status = Status::Violated;
                    verdict.witness = AgingWitness{pts[i], pts[j], pts[j], gap};
                    verdict.note = "S(z)S(t) > S(z+t)";
                    return verdict;
                }
            }
        }
        return verdict;
    }

    std::size_t skipped = 0;
    for (std::size_t zi = 0; zi < n; ++zi) {
        for (std::size_t a = 0; a < n; ++a) {
            if (at[a] == 0.0) {
                ++skipped;
                continue;
            }
            const double r1 = sums[zi * n + a] / at[a];
            for (std::size_t b = a + 1; b < n; ++b) {
                if (at[b] == 0.0) {
                    ++skipped;
                    continue;
                }
                const double r2 = sums[zi * n + b] / at[b];
                // DFR: r1 <= r2, IFR: r1 >= r2.
                const double gap = mode == AgingMode::DFR ? r1 - r2 : r2 - r1;
                if (gap > kSurvivalFloor && gap > rel_tol * std::max(r1, r2)) {
                    verdict.status = Status::Violated;
                    verdict.witness = AgingWitness{pts[zi], pts[a], pts[b], gap};
                    verdict.note = mode == AgingMode::DFR ? "S(z+t)/S(t) decreases between t1 and t2"
                                                          : "S(z+t)/S(t) increases between t1 and t2";
                    return verdict;
                }
            }
        }
    }
    if (skipped > 0) verdict.note += "; comparisons with zero denominator skipped";
    return verdict;
}

OrderVerdict st_compare_values(const std::vector<double>& sx, const std::vector<double>& sy, const Grid& grid,
                               double tol) {
    const auto& pts = grid.points();
    if (sx.size() != pts.size() || sy.size() != pts.size()) {
        throw std::invalid_argument("st_compare_values: survival arrays must match the grid");
    }
    OrderVerdict out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!out.x_above && sx[i] > sy[i] + tol) out.x_above = OrderWitness{pts[i], sx[i], sy[i]};
        if (!out.y_above && sy[i] > sx[i] + tol) out.y_above = OrderWitness{pts[i], sx[i], sy[i]};
    }
    if (out.x_above && out.y_above) {
        out.order = Order::Incomparable;
    } else if (out.x_above) {
        out.order = Order::GE;
    } else if (out.y_above) {
        out.order = Order::LE;
    } else {
        out.order = Order::EQ;
    }
    return out;
}

OrderVerdict st_compare(const Lifetime& x, const Lifetime& y, const Grid& grid, double tol) {
    std::vector<double> sx, sy;
    sx.reserve(grid.size());
    sy.reserve(grid.size());
    for (double t : grid.points()) {
        sx.push_back(x.survival(t));
        sy.push_back(y.survival(t));
    }
    return st_compare_values(sx, sy, grid, tol);
}

double quantile_invert(const Lifetime& x, double u) { return x.quantile(u); }

}  // namespace dfr
