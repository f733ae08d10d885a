#pragma once

#include <cstddef>
#include <functional>

namespace dfr {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration with an absolute
/// error target. The interval with the largest local error is bisected until
/// the summed error estimate drops below `abs_tol` or `max_intervals` is hit.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                    std::size_t max_intervals = 400);

/// Double-exponential (tanh-sinh) integration on a finite interval. Suited to
/// integrands with endpoint singularities, including the logarithmic kind
/// produced by inverse-transform substitutions. The error target is relative
/// to the L1 norm of f, so for a bounded nonnegative f on [0,1] it is also an
/// absolute bound.
QuadratureResult integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b, double rel_tol);

/// Single (non-adaptive) 15-point Kronrod rule with its embedded Gauss estimate.
QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b);

}  // namespace dfr
