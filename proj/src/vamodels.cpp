#include "dfrkit/vamodels.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "dfrkit/errors.hpp"
#include "dfrkit/format.hpp"

namespace dfr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

bool is_deterministic(const RepairPolicy& policy) { return !std::holds_alternative<IidRandom>(policy); }

double degree_at(const RepairPolicy& policy, std::size_t n) {
    if (n == 0) throw DomainError("degree_at: degrees are indexed from 1");
    return std::visit(Overloaded{
                          [](const DeterministicConstant& c) { return c.q; },
                          [n](const DeterministicSequence& s) {
                              if (s.degrees.empty()) throw DomainError("DeterministicSequence: no degrees");
                              return s.degrees[std::min(n, s.degrees.size()) - 1];
                          },
                          [](const IidRandom&) -> double {
                              throw UnsupportedError("degree_at: policy is random, not deterministic");
                          },
                      },
                      policy);
}

bool allows_worse_repair(const RepairPolicy& policy) {
    return std::visit(Overloaded{
                          [](const DeterministicConstant& c) { return c.q > 1.0; },
                          [](const DeterministicSequence& s) {
                              for (double a : s.degrees) {
                                  if (a > 1.0) return true;
                              }
                              return false;
                          },
                          [](const IidRandom& r) { return r.law.survival(1.0) > 0.0; },
                      },
                      policy);
}

std::string describe(const RepairPolicy& policy) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const DeterministicConstant& c) { os << "constant(q=" << c.q << ')'; },
                   [&](const DeterministicSequence& s) {
                       os << "sequence(";
                       for (std::size_t i = 0; i < s.degrees.size(); ++i) os << (i ? "," : "") << s.degrees[i];
                       os << ", last repeats)";
                   },
                   [&](const IidRandom& r) { os << "iid(" << r.law.describe() << ')'; },
               },
               policy);
    return os.str();
}

std::string describe(const VirtualAgeRule& rule) {
    return std::visit(Overloaded{
                          [](const KijimaI&) { return std::string("KijimaI"); },
                          [](const KijimaII&) { return std::string("KijimaII"); },
                          [](const CustomRule& c) { return "Custom(" + c.name + ")"; },
                      },
                      rule);
}

double step_virtual_age(const VirtualAgeRule& rule, double v, double x, double a) {
    if (!(v >= 0.0) || !(x >= 0.0) || !(a >= 0.0)) {
        throw DomainError("step_virtual_age: v, x and a must be nonnegative");
    }
    return std::visit(Overloaded{
                          [&](const KijimaI&) { return v + a * x; },
                          [&](const KijimaII&) { return a * (v + x); },
                          [&](const CustomRule& c) {
                              const double out = c.psi(v, x, a);
                              if (!(out >= 0.0) || !std::isfinite(out)) {
                                  throw DomainError("custom virtual-age rule returned a negative or non-finite age");
                              }
                              return out;
                          },
                      },
                      rule);
}

Lifetime next_interarrival_survival(const VirtualAgeModel& model, double age) {
    if (!(age >= 0.0)) throw DomainError("next_interarrival_survival: age must be nonnegative");
    return residual(model.base, age);
}

namespace {

double draw_degree(const RepairPolicy& policy, std::size_t n, RngStream& rng) {
    if (const auto* random = std::get_if<IidRandom>(&policy)) return random->law.sample(rng);
    return degree_at(policy, n);
}

}  // namespace

Trajectory sample_trajectory(const VirtualAgeModel& model, std::size_t n_max, RngStream& rng) {
    if (n_max < 1) throw DomainError("sample_trajectory: n_max must be at least 1");
    Trajectory t;
    t.x.reserve(n_max);
    t.a.reserve(n_max);
    t.v.reserve(n_max + 1);
    t.s.reserve(n_max + 1);
    t.v.push_back(0.0);
    t.s.push_back(0.0);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double v_prev = t.v.back();
        const double a = draw_degree(model.policy, n, rng);
        const double u = rng.uniform();
        if (!t.absorbed_at && !(model.base.survival(v_prev) > 0.0)) t.absorbed_at = n - 1;
        const double x = model.base.residual_quantile(v_prev, u);
        t.a.push_back(a);
        t.x.push_back(x);
        t.v.push_back(step_virtual_age(model.rule, v_prev, x, a));
        t.s.push_back(t.s.back() + x);
    }
    return t;
}

void sample_arrivals(const VirtualAgeModel& model, std::span<double> arrivals, RngStream& rng) {
    if (arrivals.empty()) return;
    arrivals[0] = 0.0;
    double v = 0.0;
    for (std::size_t n = 1; n < arrivals.size(); ++n) {
        const double a = draw_degree(model.policy, n, rng);
        const double x = model.base.residual_quantile(v, rng.uniform());
        v = step_virtual_age(model.rule, v, x, a);
        arrivals[n] = arrivals[n - 1] + x;
    }
}

double virtual_age_after(const VirtualAgeModel& model, History history) {
    double v = 0.0;
    for (std::size_t k = 0; k < history.size(); ++k) {
        v = step_virtual_age(model.rule, v, history[k], degree_at(model.policy, k + 1));
    }
    return v;
}

std::vector<double> sample_continuation(const VirtualAgeModel& model, History history, std::size_t steps,
                                        RngStream& rng) {
    double v = virtual_age_after(model, history);
    std::vector<double> out;
    out.reserve(steps);
    for (std::size_t k = 1; k <= steps; ++k) {
        const std::size_t n = history.size() + k;
        const double a = draw_degree(model.policy, n, rng);
        const double x = model.base.residual_quantile(v, rng.uniform());
        v = step_virtual_age(model.rule, v, x, a);
        out.push_back(x);
    }
    return out;
}

HistoryKernel induced_kernel(const VirtualAgeModel& model, std::size_t n) {
    if (!is_deterministic(model.policy)) {
        throw UnsupportedError("induced_kernel: random repair degrees do not give a history kernel");
    }
    HistoryKernel k;
    k.arity = n;
    k.domain = [model](History x) {
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(model.base.survival(v + x[i]) > 0.0)) return false;
            v = step_virtual_age(model.rule, v, x[i], degree_at(model.policy, i + 1));
        }
        return true;
    };
    k.law = [model](History x) { return next_interarrival_survival(model, virtual_age_after(model, x)); };
    return k;
}

CountingProcess as_process(const VirtualAgeModel& model) {
    CountingProcess p;
    p.name = describe(model.rule) + " / " + model.base.describe() + " / " + describe(model.policy);
    p.kernel = [model](std::size_t n) { return induced_kernel(model, n); };
    return p;
}

void write_trajectory_csv_header(std::ostream& os) { os << "trajectory_id,n,x,a,v,s,seed\n"; }

void write_trajectory_csv(std::ostream& os, const Trajectory& t, std::size_t trajectory_id, std::uint64_t seed) {
    for (std::size_t n = 1; n < t.v.size(); ++n) {
        os << trajectory_id << ',' << n << ',' << format_double(t.x[n - 1]) << ',' << format_double(t.a[n - 1]) << ','
           << format_double(t.v[n]) << ',' << format_double(t.s[n]) << ',' << seed << '\n';
    }
}

}  // namespace dfr
