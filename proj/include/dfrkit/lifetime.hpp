#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfrkit/rng.hpp"

namespace dfr {

/// Interface for the law of a nonnegative random time.
///
/// Implementations provide the survival function S(t) = P(X > t). Everything
/// else has a generic fallback, so a custom law only has to override what it
/// can do better than bisection or numerical integration.
class LifetimeModel {
public:
    virtual ~LifetimeModel() = default;

    virtual double survival(double t) const = 0;

    /// Smallest t >= 0 with survival(t) <= u, for u in (0,1).
    virtual double quantile(double u) const;

    /// Smallest z >= 0 with survival(v + z) <= u * survival(v); caller
    /// guarantees survival(v) > 0.
    virtual double residual_quantile(double v, double u) const;

    virtual std::optional<double> support_upper() const { return std::nullopt; }
    virtual std::optional<double> hazard(double /*t*/) const { return std::nullopt; }
    virtual double mean() const;

    /// True when survival and quantile are analytic (no step functions,
    /// no numerical inversion); quadrature estimators require this.
    virtual bool closed_form() const { return false; }

    virtual std::string describe() const = 0;
};

/// Immutable, cheaply copyable handle to a lifetime law.
class Lifetime {
public:
    explicit Lifetime(std::shared_ptr<const LifetimeModel> model);

    double survival(double t) const { return model_->survival(t); }
    /// Generalized inverse of the survival function; u must lie in (0,1].
    double quantile(double u) const;
    /// Residual quantile at virtual age v (see LifetimeModel::residual_quantile);
    /// returns 0 when survival(v) == 0.
    double residual_quantile(double v, double u) const;
    double sample(RngStream& rng) const { return quantile(rng.uniform()); }

    std::optional<double> support_upper() const { return model_->support_upper(); }
    double atom_at_zero() const { return 1.0 - model_->survival(0.0); }
    std::optional<double> hazard(double t) const { return model_->hazard(t); }
    double mean() const { return model_->mean(); }
    bool closed_form() const { return model_->closed_form(); }
    std::string describe() const { return model_->describe(); }

    const LifetimeModel& model() const { return *model_; }

private:
    std::shared_ptr<const LifetimeModel> model_;
};

// Parametric catalogue. Parameters must be strictly positive.
Lifetime exponential(double rate);
Lifetime weibull(double shape, double scale);
Lifetime gamma(double shape, double rate);
Lifetime uniform_zero_to(double upper);
/// Right-continuous empirical law of a nonnegative sample (sorted on entry).
Lifetime empirical(std::vector<double> values);

// Laws built from other laws or used as kernel outputs.
Lifetime point_mass(double at);
Lifetime discrete(std::vector<double> values, std::vector<double> probabilities);
/// Law of X - v given X > v, i.e. survival z -> S(v+z)/S(v); point mass at 0 if S(v) = 0.
Lifetime residual(const Lifetime& base, double age);
Lifetime shifted(const Lifetime& base, double offset);
Lifetime scaled(const Lifetime& base, double factor);

/// Smallest t with survival(t) <= u by bisection on [0, upper] (or a doubling
/// bracket when upper is absent); 200 iterations, tolerance 1e-10.
double bisect_quantile(const LifetimeModel& law, double u, std::optional<double> upper);

}  // namespace dfr
