#include "dfrkit/lifetime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "dfrkit/errors.hpp"
#include "dfrkit/quadrature.hpp"

namespace dfr {

namespace {

std::string format_params(const char* name, std::initializer_list<double> params) {
    std::ostringstream os;
    os.precision(10);
    os << name << '(';
    bool first = true;
    for (double p : params) {
        if (!first) os << ", ";
        os << p;
        first = false;
    }
    os << ')';
    return os.str();
}

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be finite and strictly positive");
    }
}

class Exponential final : public LifetimeModel {
public:
    explicit Exponential(double rate) : rate_(rate) {}
    double survival(double t) const override { return t <= 0.0 ? 1.0 : std::exp(-rate_ * t); }
    double quantile(double u) const override { return -std::log(u) / rate_; }
    double residual_quantile(double, double u) const override { return quantile(u); }
    std::optional<double> hazard(double) const override { return rate_; }
    double mean() const override { return 1.0 / rate_; }
    bool closed_form() const override { return true; }
    std::string describe() const override { return format_params("Exponential", {rate_}); }

private:
    double rate_;
};

class Weibull final : public LifetimeModel {
public:
    Weibull(double shape, double scale) : shape_(shape), scale_(scale) {}
    double survival(double t) const override {
        return t <= 0.0 ? 1.0 : std::exp(-cumulative_hazard(t));
    }
    double quantile(double u) const override { return scale_ * std::pow(-std::log(u), 1.0 / shape_); }
    double residual_quantile(double v, double u) const override {
        // Work on the cumulative hazard so that deep residuals do not underflow.
        const double target = cumulative_hazard(v) - std::log(u);
        return std::max(0.0, scale_ * std::pow(target, 1.0 / shape_) - v);
    }
    std::optional<double> hazard(double t) const override {
        return shape_ / scale_ * std::pow(std::max(t, 0.0) / scale_, shape_ - 1.0);
    }
    double mean() const override { return scale_ * std::tgamma(1.0 + 1.0 / shape_); }
    bool closed_form() const override { return true; }
    std::string describe() const override { return format_params("Weibull", {shape_, scale_}); }

private:
    double cumulative_hazard(double t) const { return std::pow(std::max(t, 0.0) / scale_, shape_); }
    double shape_, scale_;
};

class Gamma final : public LifetimeModel {
public:
    Gamma(double shape, double rate) : shape_(shape), rate_(rate) {}
    double survival(double t) const override {
        return t <= 0.0 ? 1.0 : boost::math::gamma_q(shape_, rate_ * t);
    }
    double quantile(double u) const override { return boost::math::gamma_q_inv(shape_, u) / rate_; }
    std::optional<double> hazard(double t) const override {
        if (t <= 0.0) return shape_ < 1.0 ? std::numeric_limits<double>::infinity() : (shape_ == 1.0 ? rate_ : 0.0);
        const double s = survival(t);
        if (s <= 0.0) return std::nullopt;
        return rate_ * boost::math::gamma_p_derivative(shape_, rate_ * t) / s;
    }
    double mean() const override { return shape_ / rate_; }
    bool closed_form() const override { return true; }
    std::string describe() const override { return format_params("Gamma", {shape_, rate_}); }

private:
    double shape_, rate_;
};

class UniformZeroTo final : public LifetimeModel {
public:
    explicit UniformZeroTo(double upper) : upper_(upper) {}
    double survival(double t) const override {
        if (t <= 0.0) return 1.0;
        return t < upper_ ? 1.0 - t / upper_ : 0.0;
    }
    double quantile(double u) const override { return upper_ * (1.0 - u); }
    double residual_quantile(double v, double u) const override { return std::max(0.0, (upper_ - v) * (1.0 - u)); }
    std::optional<double> support_upper() const override { return upper_; }
    std::optional<double> hazard(double t) const override {
        if (t >= upper_) return std::nullopt;
        return 1.0 / (upper_ - std::max(t, 0.0));
    }
    double mean() const override { return 0.5 * upper_; }
    bool closed_form() const override { return true; }
    std::string describe() const override { return format_params("UniformZeroTo", {upper_}); }

private:
    double upper_;
};

/// Finite discrete law on sorted distinct support points.
class Discrete final : public LifetimeModel {
public:
    Discrete(std::vector<double> values, std::vector<double> probs, std::string name)
        : values_(std::move(values)), name_(std::move(name)) {
        // tail_[i] = P(X > values_[i-1]) with tail_[0] = 1.
        tail_.assign(values_.size() + 1, 0.0);
        double acc = 0.0;
        for (std::size_t i = values_.size(); i-- > 0;) {
            acc += probs[i];
            tail_[i] = acc;
        }
        tail_[0] = 1.0;
        probs_ = std::move(probs);
    }

    double survival(double t) const override {
        if (t < 0.0) return 1.0;
        const auto idx = std::upper_bound(values_.begin(), values_.end(), t) - values_.begin();
        return idx == 0 ? 1.0 : std::min(1.0, tail_[static_cast<std::size_t>(idx)]);
    }

    double quantile(double u) const override {
        if (survival(0.0) <= u) return 0.0;
        // First support point whose survival drops to u or below.
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (tail_[i + 1] <= u) return values_[i];
        }
        return values_.back();
    }

    std::optional<double> support_upper() const override { return values_.back(); }
    double mean() const override {
        double m = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
        return m;
    }
    std::string describe() const override { return name_; }

private:
    std::vector<double> values_;
    std::vector<double> probs_;
    std::vector<double> tail_;
    std::string name_;
};

class Empirical final : public LifetimeModel {
public:
    explicit Empirical(std::vector<double> sorted) : values_(std::move(sorted)) {}
    double survival(double t) const override {
        if (t < 0.0) return 1.0;
        const auto above = values_.end() - std::upper_bound(values_.begin(), values_.end(), t);
        return static_cast<double>(above) / static_cast<double>(values_.size());
    }
    double quantile(double u) const override {
        const std::size_t n = values_.size();
        const auto allowed = static_cast<std::size_t>(std::floor(u * static_cast<double>(n)));
        if (allowed >= n) return 0.0;
        return values_[n - allowed - 1];
    }
    std::optional<double> support_upper() const override { return values_.back(); }
    double mean() const override {
        return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
    }
    std::string describe() const override {
        return "Empirical(n=" + std::to_string(values_.size()) + ")";
    }

private:
    std::vector<double> values_;
};

class Residual final : public LifetimeModel {
public:
    Residual(Lifetime base, double age) : base_(std::move(base)), age_(age), base_at_age_(base_.survival(age)) {}
    double survival(double z) const override {
        if (base_at_age_ <= 0.0) return 0.0;
        if (z < 0.0) return 1.0;
        return std::min(1.0, base_.survival(age_ + z) / base_at_age_);
    }
    double quantile(double u) const override { return base_.residual_quantile(age_, u); }
    double residual_quantile(double v, double u) const override { return base_.residual_quantile(age_ + v, u); }
    std::optional<double> support_upper() const override {
        if (auto b = base_.support_upper()) return std::max(0.0, *b - age_);
        return std::nullopt;
    }
    std::optional<double> hazard(double z) const override { return base_.hazard(age_ + z); }
    bool closed_form() const override { return base_.closed_form(); }
    std::string describe() const override {
        std::ostringstream os;
        os.precision(10);
        os << "Residual(" << base_.describe() << ", age=" << age_ << ')';
        return os.str();
    }

private:
    Lifetime base_;
    double age_;
    double base_at_age_;
};

class Shifted final : public LifetimeModel {
public:
    Shifted(Lifetime base, double offset) : base_(std::move(base)), offset_(offset) {}
    double survival(double t) const override { return t < offset_ ? 1.0 : base_.survival(t - offset_); }
    double quantile(double u) const override { return base_.quantile(u) + offset_; }
    std::optional<double> support_upper() const override {
        if (auto b = base_.support_upper()) return *b + offset_;
        return std::nullopt;
    }
    double mean() const override { return base_.mean() + offset_; }
    bool closed_form() const override { return base_.closed_form(); }
    std::string describe() const override {
        std::ostringstream os;
        os << "Shifted(" << base_.describe() << ", +" << offset_ << ')';
        return os.str();
    }

private:
    Lifetime base_;
    double offset_;
};

class Scaled final : public LifetimeModel {
public:
    Scaled(Lifetime base, double factor) : base_(std::move(base)), factor_(factor) {}
    double survival(double t) const override { return base_.survival(t / factor_); }
    double quantile(double u) const override { return factor_ * base_.quantile(u); }
    std::optional<double> support_upper() const override {
        if (auto b = base_.support_upper()) return *b * factor_;
        return std::nullopt;
    }
    std::optional<double> hazard(double t) const override {
        if (auto h = base_.hazard(t / factor_)) return *h / factor_;
        return std::nullopt;
    }
    double mean() const override { return factor_ * base_.mean(); }
    bool closed_form() const override { return base_.closed_form(); }
    std::string describe() const override {
        std::ostringstream os;
        os << "Scaled(" << base_.describe() << ", x" << factor_ << ')';
        return os.str();
    }

private:
    Lifetime base_;
    double factor_;
};

}  // namespace

double LifetimeModel::quantile(double u) const { return bisect_quantile(*this, u, support_upper()); }

double LifetimeModel::residual_quantile(double v, double u) const {
    const double sv = survival(v);
    return std::max(0.0, quantile(u * sv) - v);
}

double LifetimeModel::mean() const {
    if (auto upper = support_upper()) {
        return integrate_adaptive([this](double t) { return survival(t); }, 0.0, *upper, 1e-10).value;
    }
    // t = s / (1 - s) maps [0,1) onto [0, inf).
    auto integrand = [this](double s) {
        if (s >= 1.0) return 0.0;
        const double one_minus = 1.0 - s;
        return survival(s / one_minus) / (one_minus * one_minus);
    };
    return integrate_adaptive(integrand, 0.0, 1.0, 1e-10).value;
}

Lifetime::Lifetime(std::shared_ptr<const LifetimeModel> model) : model_(std::move(model)) {
    if (!model_) throw std::invalid_argument("Lifetime: null model");
}

double Lifetime::quantile(double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("quantile: u must lie in (0,1]");
    if (u == 1.0) return 0.0;  // survival(0) <= 1 always
    return model_->quantile(u);
}

double Lifetime::residual_quantile(double v, double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("residual_quantile: u must lie in (0,1]");
    if (v < 0.0) throw DomainError("residual_quantile: negative age");
    if (model_->survival(v) <= 0.0) return 0.0;
    if (u == 1.0) return 0.0;
    if (v == 0.0) return model_->quantile(u);
    return model_->residual_quantile(v, u);
}

double bisect_quantile(const LifetimeModel& law, double u, std::optional<double> upper) {
    if (law.survival(0.0) <= u) return 0.0;
    double lo = 0.0;
    double hi = upper.value_or(1.0);
    while (law.survival(hi) > u) {
        if (upper) throw DomainError("bisect_quantile: survival positive at support upper bound");
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw DomainError("bisect_quantile: no finite bracket");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (law.survival(mid) <= u) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

Lifetime exponential(double rate) {
    require_positive(rate, "Exponential rate");
    return Lifetime(std::make_shared<Exponential>(rate));
}

Lifetime weibull(double shape, double scale) {
    require_positive(shape, "Weibull shape");
    require_positive(scale, "Weibull scale");
    return Lifetime(std::make_shared<Weibull>(shape, scale));
}

Lifetime gamma(double shape, double rate) {
    require_positive(shape, "Gamma shape");
    require_positive(rate, "Gamma rate");
    return Lifetime(std::make_shared<Gamma>(shape, rate));
}

Lifetime uniform_zero_to(double upper) {
    require_positive(upper, "Uniform upper bound");
    return Lifetime(std::make_shared<UniformZeroTo>(upper));
}

Lifetime empirical(std::vector<double> values) {
    if (values.empty()) throw DomainError("Empirical: empty sample");
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("Empirical: values must be finite and nonnegative");
    }
    std::sort(values.begin(), values.end());
    return Lifetime(std::make_shared<Empirical>(std::move(values)));
}

Lifetime point_mass(double at) {
    if (!(at >= 0.0) || !std::isfinite(at)) throw DomainError("point_mass: location must be finite and nonnegative");
    return Lifetime(std::make_shared<Discrete>(std::vector<double>{at}, std::vector<double>{1.0},
                                               format_params("PointMass", {at})));
}

Lifetime discrete(std::vector<double> values, std::vector<double> probabilities) {
    if (values.empty() || values.size() != probabilities.size()) {
        throw DomainError("discrete: values and probabilities must be nonempty and of equal length");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> v, p;
    double total = 0.0;
    for (auto i : order) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]) || !(probabilities[i] >= 0.0)) {
            throw DomainError("discrete: values must be nonnegative and probabilities nonnegative");
        }
        total += probabilities[i];
        if (!v.empty() && v.back() == values[i]) {
            p.back() += probabilities[i];
        } else {
            v.push_back(values[i]);
            p.push_back(probabilities[i]);
        }
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("discrete: probabilities must sum to 1");
    for (auto& x : p) x /= total;
    std::ostringstream os;
    os << "Discrete(" << v.size() << " points)";
    return Lifetime(std::make_shared<Discrete>(std::move(v), std::move(p), os.str()));
}

Lifetime residual(const Lifetime& base, double age) {
    if (!(age >= 0.0)) throw DomainError("residual: age must be nonnegative");
    if (age == 0.0) return base;
    if (base.survival(age) <= 0.0) return point_mass(0.0);
    return Lifetime(std::make_shared<Residual>(base, age));
}

Lifetime shifted(const Lifetime& base, double offset) {
    if (!(offset >= 0.0)) throw DomainError("shifted: offset must be nonnegative");
    return Lifetime(std::make_shared<Shifted>(base, offset));
}

Lifetime scaled(const Lifetime& base, double factor) {
    require_positive(factor, "scale factor");
    return Lifetime(std::make_shared<Scaled>(base, factor));
}

}  // namespace dfr
