#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dfrkit/lifetime.hpp"
#include "dfrkit/rng.hpp"

namespace dfr {

using History = std::span<const double>;

/// Conditional law of the next interarrival time given the first `arity`
/// interarrivals. `domain` plays the role of the almost-sure history set;
/// `law` is only consulted on histories inside it.
struct HistoryKernel {
    std::size_t arity = 0;
    std::function<bool(History)> domain;
    std::function<Lifetime(History)> law;

    bool contains(History x) const;
    /// Throws DomainError when x is outside the domain or of the wrong length.
    Lifetime at(History x) const;

    /// History-independent kernel; domain is every finite nonnegative history.
    static HistoryKernel constant(std::size_t arity, Lifetime law);
};

/// Two-step kernel: draw x_{n+1} from first.at(x), then x_{n+2} from
/// second.at((x, x_{n+1})). Where (x, x_{n+1}) falls outside the second
/// kernel's domain the second coordinate is taken to be 0 and the draw is
/// flagged as zero-extended.
class ComposedKernel {
public:
    ComposedKernel(HistoryKernel first, HistoryKernel second);

    std::size_t arity() const { return first_.arity; }
    bool contains(History x) const { return first_.contains(x); }
    const HistoryKernel& first() const { return first_; }
    const HistoryKernel& second() const { return second_; }

private:
    HistoryKernel first_;
    HistoryKernel second_;
};

/// Throws std::invalid_argument unless second.arity == first.arity + 1.
ComposedKernel compose(HistoryKernel first, HistoryKernel second);

struct JointDraw {
    double first = 0.0;
    double second = 0.0;
    bool zero_extended = false;
};

JointDraw sample_joint(const ComposedKernel& ck, History x, RngStream& rng);

/// E[h(Z_{n+1}, Z_{n+2})] under the composed law at x, by nested adaptive
/// quadrature over the inverse-transform uniforms.
double expect_pair(const ComposedKernel& ck, History x, const std::function<double(double, double)>& h,
                   double abs_tol = 1e-9);
double expect_first(const ComposedKernel& ck, History x, const std::function<double(double)>& h,
                    double abs_tol = 1e-9);
double expect_sum(const ComposedKernel& ck, History x, const std::function<double(double)>& h,
                  double abs_tol = 1e-9);

/// A counting process given by its sequence of conditional kernels:
/// kernel(0) has arity 0 and carries the law of X_1.
struct CountingProcess {
    std::string name;
    std::function<HistoryKernel(std::size_t)> kernel;

    /// Sequential draw of X_1..X_n; histories outside a kernel's domain get 0.
    std::vector<double> sample(std::size_t n, RngStream& rng) const;
};

struct SubTest {
    std::string label;
    double statistic = 0.0;
    double critical = 0.0;
    bool pass = true;
};

/// PASS iff every sub-test statistic is at most its critical value.
struct TestReport {
    std::vector<SubTest> tests;
    bool pass = true;
    std::size_t n_first = 0;
    std::size_t n_second = 0;
    double alpha = 0.0;
};

using JointSampler = std::function<std::pair<double, double>(RngStream&)>;

/// Two-sample KS comparison of composed-kernel draws at x against draws from
/// an independent sampler of (X_{n+1}, X_{n+2}) given the same history.
/// Three statistics (each coordinate and the sum), Bonferroni at alpha/3.
TestReport verify_composition(const ComposedKernel& ck, History x, const JointSampler& direct,
                              std::size_t n_samples, double alpha, std::uint64_t seed);

}  // namespace dfr
