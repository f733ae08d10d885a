#include "dfrkit/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "dfrkit/errors.hpp"
#include "dfrkit/quadrature.hpp"
#include "dfrkit/stats.hpp"

namespace dfr {

namespace {

bool finite_nonnegative(History x) {
    for (double v : x) {
        if (!(v >= 0.0) || !std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace

bool HistoryKernel::contains(History x) const {
    if (x.size() != arity || !finite_nonnegative(x)) return false;
    return !domain || domain(x);
}

Lifetime HistoryKernel::at(History x) const {
    if (x.size() != arity) throw DomainError("HistoryKernel::at: history length does not match arity");
    if (!contains(x)) throw DomainError("HistoryKernel::at: history outside kernel domain");
    return law(x);
}

HistoryKernel HistoryKernel::constant(std::size_t arity, Lifetime law) {
    HistoryKernel k;
    k.arity = arity;
    k.domain = [](History) { return true; };
    k.law = [law = std::move(law)](History) { return law; };
    return k;
}

ComposedKernel::ComposedKernel(HistoryKernel first, HistoryKernel second)
    : first_(std::move(first)), second_(std::move(second)) {
    if (second_.arity != first_.arity + 1) {
        throw std::invalid_argument("compose: second kernel arity must be first arity + 1");
    }
}

ComposedKernel compose(HistoryKernel first, HistoryKernel second) {
    return ComposedKernel(std::move(first), std::move(second));
}

JointDraw sample_joint(const ComposedKernel& ck, History x, RngStream& rng) {
    const Lifetime first = ck.first().at(x);
    JointDraw draw;
    draw.first = first.sample(rng);
    std::vector<double> extended(x.begin(), x.end());
    extended.push_back(draw.first);
    // Always consume one uniform for the second coordinate so streams stay aligned.
    const double u = rng.uniform();
    if (ck.second().contains(extended)) {
        draw.second = ck.second().at(extended).quantile(u);
    } else {
        draw.zero_extended = true;
    }
    return draw;
}

double expect_pair(const ComposedKernel& ck, History x, const std::function<double(double, double)>& h,
                   double abs_tol) {
    const Lifetime first = ck.first().at(x);
    std::vector<double> extended(x.begin(), x.end());
    extended.push_back(0.0);
    auto outer = [&](double u1) {
        const double z1 = first.quantile(u1);
        extended.back() = z1;
        if (!ck.second().contains(extended)) return h(z1, 0.0);
        const Lifetime second = ck.second().at(extended);
        auto inner = [&](double u2) { return h(z1, second.quantile(u2)); };
        return integrate_adaptive(inner, 0.0, 1.0, 0.1 * abs_tol).value;
    };
    return integrate_adaptive(outer, 0.0, 1.0, abs_tol).value;
}

double expect_first(const ComposedKernel& ck, History x, const std::function<double(double)>& h, double abs_tol) {
    const Lifetime first = ck.first().at(x);
    return integrate_adaptive([&](double u) { return h(first.quantile(u)); }, 0.0, 1.0, abs_tol).value;
}

double expect_sum(const ComposedKernel& ck, History x, const std::function<double(double)>& h, double abs_tol) {
    return expect_pair(ck, x, [&](double a, double b) { return h(a + b); }, abs_tol);
}

std::vector<double> CountingProcess::sample(std::size_t n, RngStream& rng) const {
    std::vector<double> xs;
    xs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const HistoryKernel kern = kernel(k);
        const double u = rng.uniform();
        xs.push_back(kern.contains(xs) ? kern.at(xs).quantile(u) : 0.0);
    }
    return xs;
}

TestReport verify_composition(const ComposedKernel& ck, History x, const JointSampler& direct,
                              std::size_t n_samples, double alpha, std::uint64_t seed) {
    if (n_samples < 1000) throw DomainError("verify_composition: need at least 1000 samples");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("verify_composition: alpha must lie in (0,1)");
    if (!ck.contains(x)) throw DomainError("verify_composition: history outside kernel domain");

    std::vector<double> c1(n_samples), c2(n_samples), cs(n_samples);
    std::vector<double> d1(n_samples), d2(n_samples), ds(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        RngStream composed_rng(seed, streams::kTrajectory + i);
        const JointDraw draw = sample_joint(ck, x, composed_rng);
        c1[i] = draw.first;
        c2[i] = draw.second;
        cs[i] = draw.first + draw.second;

        RngStream direct_rng(seed, streams::kDirect + i);
        const auto [a, b] = direct(direct_rng);
        d1[i] = a;
        d2[i] = b;
        ds[i] = a + b;
    }

    const double level = alpha / 3.0;
    TestReport report;
    report.alpha = alpha;
    report.n_first = n_samples;
    report.n_second = n_samples;
    const std::pair<const char*, std::pair<std::vector<double>*, std::vector<double>*>> parts[] = {
        {"first", {&c1, &d1}}, {"second", {&c2, &d2}}, {"sum", {&cs, &ds}}};
    for (const auto& [label, samples] : parts) {
        const KsResult ks = ks_two_sample(std::move(*samples.first), std::move(*samples.second), level);
        report.tests.push_back({label, ks.statistic, ks.critical, ks.pass});
        report.pass = report.pass && ks.pass;
    }
    return report;
}

}  // namespace dfr
