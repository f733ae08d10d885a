#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dfr {

/// Standard normal quantile.
double normal_quantile(double p);

/// Asymptotic Kolmogorov-Smirnov critical coefficient c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_critical_coefficient(double alpha);

struct KsResult {
    double statistic = 0.0;
    double critical = 0.0;
    bool pass = true;
};

/// One-sample KS test of `sample` against a continuous or discrete CDF
/// given through its survival function. The sample is copied and sorted.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& survival, double alpha);

/// Two-sample KS test; both inputs are copied and sorted.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha);

/// Running mean and co-moment matrix of a fixed-dimension vector.
///
/// Partial accumulators merge with Chan's pairwise update, so a fixed merge
/// tree gives bit-identical results independent of which thread filled
/// which partial.
class MomentAccumulator {
public:
    explicit MomentAccumulator(std::size_t dim = 0);

    void add(std::span<const double> values);
    void merge(const MomentAccumulator& other);

    std::size_t dim() const { return dim_; }
    std::size_t count() const { return count_; }
    const std::vector<double>& mean() const { return mean_; }
    /// Unbiased covariance (divisor count-1), row-major dim x dim.
    std::vector<double> covariance() const;

private:
    std::size_t dim_;
    std::size_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> comoment_;
    std::vector<double> delta_;
};

/// Merge partial accumulators in index order by a balanced pairwise tree.
MomentAccumulator merge_pairwise(std::vector<MomentAccumulator> parts);

}  // namespace dfr
