#include "dfrkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "dfrkit/errors.hpp"

namespace dfr {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

double ks_critical_coefficient(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("KS level must lie in (0,1)");
    return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& survival, double alpha) {
    if (sample.empty()) throw DomainError("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sample.size()) {
        const double x = sample[i];
        std::size_t j = i;
        while (j < sample.size() && sample[j] == x) ++j;
        // Empirical CDF just before x is i/n and at x is j/n; model CDF at x
        // is 1 - S(x); just before x it is at least 1 - S(x) - jump, bounded
        // by evaluating the survival slightly to the left.
        const double cdf_at = 1.0 - survival(x);
        const double left = std::nextafter(x, -1.0);
        const double cdf_before = x > 0.0 ? 1.0 - survival(left) : 0.0;
        d = std::max({d, std::abs(static_cast<double>(j) / n - cdf_at), std::abs(static_cast<double>(i) / n - cdf_before)});
        i = j;
    }
    KsResult out;
    out.statistic = d;
    out.critical = ks_critical_coefficient(alpha) / std::sqrt(n);
    out.pass = d <= out.critical;
    return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult out;
    out.statistic = d;
    out.critical = ks_critical_coefficient(alpha) * std::sqrt((na + nb) / (na * nb));
    out.pass = d <= out.critical;
    return out;
}

MomentAccumulator::MomentAccumulator(std::size_t dim)
    : dim_(dim), mean_(dim, 0.0), comoment_(dim * dim, 0.0), delta_(dim, 0.0) {}

void MomentAccumulator::add(std::span<const double> values) {
    if (values.size() != dim_) throw std::invalid_argument("MomentAccumulator::add: dimension mismatch");
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < dim_; ++i) {
        delta_[i] = values[i] - mean_[i];
        mean_[i] += delta_[i] * inv;
    }
    // C += (x - mean_old)(x - mean_new)^T
    for (std::size_t i = 0; i < dim_; ++i) {
        const double after = values[i] - mean_[i];
        double* row = comoment_.data() + i * dim_;
        for (std::size_t j = 0; j < dim_; ++j) row[j] += after * delta_[j];
    }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.dim_ != dim_) throw std::invalid_argument("MomentAccumulator::merge: dimension mismatch");
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    for (std::size_t i = 0; i < dim_; ++i) delta_[i] = other.mean_[i] - mean_[i];
    const double scale = na * nb / n;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            comoment_[i * dim_ + j] += other.comoment_[i * dim_ + j] + delta_[i] * delta_[j] * scale;
        }
    }
    for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta_[i] * nb / n;
    count_ += other.count_;
}

std::vector<double> MomentAccumulator::covariance() const {
    std::vector<double> cov(dim_ * dim_, 0.0);
    if (count_ < 2) return cov;
    const double denom = static_cast<double>(count_ - 1);
    for (std::size_t k = 0; k < cov.size(); ++k) cov[k] = comoment_[k] / denom;
    return cov;
}

MomentAccumulator merge_pairwise(std::vector<MomentAccumulator> parts) {
    if (parts.empty()) return MomentAccumulator{};
    while (parts.size() > 1) {
        std::vector<MomentAccumulator> next;
        next.reserve((parts.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
            parts[i].merge(parts[i + 1]);
            next.push_back(std::move(parts[i]));
        }
        if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return std::move(parts.front());
}

}  // namespace dfr
