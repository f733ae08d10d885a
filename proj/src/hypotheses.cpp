#include "dfrkit/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dfrkit/errors.hpp"
#include "dfrkit/quadrature.hpp"
#include "dfrkit/stats.hpp"

namespace dfr {

std::string_view to_string(Overall o) {
    switch (o) {
        case Overall::Pass: return "PASS";
        case Overall::Fail: return "FAIL";
        case Overall::Partial: return "PARTIAL";
    }
    return "?";
}

void HypothesisReport::add(Condition c) {
    if (c.status == Status::Violated) {
        overall = Overall::Fail;
    } else if (c.status == Status::Inconclusive && overall == Overall::Pass) {
        overall = Overall::Partial;
    }
    conditions.push_back(std::move(c));
}

const Condition* HypothesisReport::find(std::string_view label) const {
    for (const auto& c : conditions) {
        if (c.label == label) return &c;
    }
    return nullptr;
}

nlohmann::json to_json(const HypothesisReport& report) {
    nlohmann::json j;
    j["subject"] = report.subject;
    j["overall"] = std::string(to_string(report.overall));
    j["conditions"] = nlohmann::json::array();
    for (const auto& c : report.conditions) {
        nlohmann::json cj;
        cj["label"] = c.label;
        cj["verdict"] = std::string(to_string(c.status));
        cj["detail"] = c.detail;
        nlohmann::json w = nlohmann::json::object();
        for (const auto& [name, value] : c.witness) w[name] = value;
        cj["witness"] = w;
        j["conditions"].push_back(cj);
    }
    j["notes"] = report.notes;
    return j;
}

namespace {

/// All histories of length n with coordinates on the grid, in lexicographic order.
std::vector<std::vector<double>> grid_histories(const Grid& grid, std::size_t n) {
    std::vector<std::vector<double>> out{{}};
    for (std::size_t level = 0; level < n; ++level) {
        std::vector<std::vector<double>> next;
        next.reserve(out.size() * grid.size());
        for (const auto& h : out) {
            for (double g : grid.points()) {
                auto extended = h;
                extended.push_back(g);
                next.push_back(std::move(extended));
            }
        }
        out = std::move(next);
    }
    return out;
}

std::vector<double> survival_on(const Lifetime& law, const Grid& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double t : grid.points()) out.push_back(law.survival(t));
    return out;
}

std::string history_text(History x) {
    std::ostringstream os;
    os.precision(6);
    os << '(';
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ')';
    return os.str();
}

/// Survival of the second coordinate of the composed law at x, on the grid.
std::vector<double> second_marginal_survival(const HistoryKernel& first, const HistoryKernel& second, History x,
                                             const Grid& grid) {
    const Lifetime law1 = first.at(x);
    std::vector<double> extended(x.begin(), x.end());
    extended.push_back(0.0);
    std::vector<double> out;
    out.reserve(grid.size());
    for (double t : grid.points()) {
        auto integrand = [&](double u) {
            extended.back() = law1.quantile(u);
            return second.contains(extended) ? second.at(extended).survival(t) : 0.0;
        };
        out.push_back(integrate_adaptive(integrand, 0.0, 1.0, 1e-10).value);
    }
    return out;
}

Condition order_condition(std::string label, const OrderVerdict& v, std::string subject) {
    Condition c;
    c.label = std::move(label);
    if (is_st_le(v.order)) {
        c.status = Status::Holds;
        c.detail = subject + ": " + std::string(to_string(v.order));
    } else {
        c.status = Status::Violated;
        c.detail = subject + ": " + std::string(to_string(v.order)) + ", required LE";
        const auto& w = *v.x_above;
        c.witness = {{"t", w.t}, {"survival_lhs", w.survival_x}, {"survival_rhs", w.survival_y}};
    }
    return c;
}

Condition aging_condition(std::string label, const ClassVerdict& v) {
    Condition c;
    c.label = std::move(label);
    c.status = v.status;
    c.detail = v.note;
    if (v.witness) {
        c.witness = {{"z", v.witness->z}, {"t1", v.witness->t1}, {"t2", v.witness->t2}, {"margin", v.witness->margin}};
    }
    return c;
}

/// Compares kernel `upper` (arity n+1) against `lower` (arity n) over grid
/// histories of length n, returning one condition and the zero-extension count.
Condition level_condition(const HistoryKernel& lower, const HistoryKernel& upper, std::size_t n,
                          const Grid& history_grid, const Grid& t_grid, std::size_t& zero_extended) {
    Condition c;
    c.label = "c.2[n=" + std::to_string(n) + "]";
    std::size_t checked = 0, eq = 0;
    for (const auto& x : grid_histories(history_grid, n)) {
        if (!lower.contains(x)) continue;
        const Lifetime current = lower.at(x);
        const auto s_current = survival_on(current, t_grid);
        for (double next : history_grid.points()) {
            auto extended = x;
            extended.push_back(next);
            if (!upper.contains(extended)) {
                // Outside N_{n+1}: the zero extension is <=_st anything.
                ++zero_extended;
                continue;
            }
            ++checked;
            const OrderVerdict v = st_compare_values(survival_on(upper.at(extended), t_grid), s_current, t_grid);
            if (v.order == Order::EQ) ++eq;
            if (!is_st_le(v.order)) {
                c.status = Status::Violated;
                c.detail = "Z at history " + history_text(extended) + " is " + std::string(to_string(v.order)) +
                           " the law at " + history_text(x) + ", required LE";
                c.witness.push_back({"t", v.x_above->t});
                for (std::size_t i = 0; i < extended.size(); ++i) {
                    c.witness.push_back({"x" + std::to_string(i + 1), extended[i]});
                }
                c.witness.push_back({"survival_next", v.x_above->survival_x});
                c.witness.push_back({"survival_current", v.x_above->survival_y});
                return c;
            }
        }
    }
    if (checked == 0) {
        c.status = Status::Inconclusive;
        c.detail = "no grid history inside the kernel domain";
    } else {
        c.status = Status::Holds;
        c.detail = std::to_string(checked) + " grid histories checked, " + std::to_string(eq) + " with EQ";
    }
    return c;
}

}  // namespace

HypothesisReport check_prcon_hypothesis(const Lifetime& x1, const HistoryKernel& k, const Grid& x1_grid,
                                        const Grid& t_grid) {
    if (k.arity != 1) throw std::invalid_argument("check_prcon_hypothesis: kernel must have arity 1");
    HypothesisReport report;
    report.subject = "Z_2^{x1} <=_st X_1 against " + x1.describe();
    const auto s_x1 = survival_on(x1, t_grid);

    Condition c;
    c.label = "ST(Z2,X1)";
    std::size_t checked = 0, eq = 0;
    for (double g : x1_grid.points()) {
        const double h[1] = {g};
        if (!k.contains(h)) continue;
        ++checked;
        const OrderVerdict v = st_compare_values(survival_on(k.at(h), t_grid), s_x1, t_grid);
        if (v.order == Order::EQ) ++eq;
        if (!is_st_le(v.order) && c.status != Status::Violated) {
            c.status = Status::Violated;
            c.detail = "at x1 = " + std::to_string(g) + " the conditional law is " + std::string(to_string(v.order)) +
                       " X1, required LE";
            c.witness = {{"x1", g}, {"t", v.x_above->t}, {"survival_z2", v.x_above->survival_x},
                         {"survival_x1", v.x_above->survival_y}};
        }
    }
    if (c.status != Status::Violated) {
        if (checked == 0) {
            c.status = Status::Inconclusive;
            c.detail = "no grid point inside the kernel domain";
        } else {
            c.status = Status::Holds;
            c.detail = std::to_string(checked) + " grid points checked" +
                       (eq == checked ? ", EQ everywhere" : ", " + std::to_string(eq) + " with EQ");
        }
    }
    report.add(std::move(c));
    return report;
}

HypothesisReport check_t2star_conditions(const VirtualAgeModel& model, std::size_t depth, const Grid& history_grid,
                                         const Grid& t_grid) {
    if (depth < 1) throw DomainError("check_t2star_conditions: depth must be at least 1");
    if (!is_deterministic(model.policy)) {
        throw UnsupportedError("check_t2star_conditions: kernel conditions need a deterministic repair policy");
    }
    HypothesisReport report;
    report.subject = describe(model.rule) + " with base " + model.base.describe() + ", degrees " +
                     describe(model.policy);

    std::vector<HistoryKernel> kernels;
    for (std::size_t n = 0; n <= depth + 1; ++n) kernels.push_back(induced_kernel(model, n));

    HypothesisReport c1 = check_prcon_hypothesis(model.base, kernels[1], history_grid, t_grid);
    Condition cond1 = c1.conditions.front();
    cond1.label = "c.1";
    report.add(std::move(cond1));

    std::size_t zero_extended = 0;
    for (std::size_t n = 1; n <= depth; ++n) {
        report.add(level_condition(kernels[n], kernels[n + 1], n, history_grid, t_grid, zero_extended));
    }
    if (zero_extended > 0) {
        report.notes.push_back("zero extension outside N_{n+1} exercised for " + std::to_string(zero_extended) +
                               " grid histories");
    }
    if (allows_worse_repair(model.policy)) report.notes.push_back("repair degrees above 1 (worse repair) present");
    return report;
}

HypothesisReport check_kijima1_conditions(const VirtualAgeModel& model, const RandomTime& T, const Grid& grid) {
    if (!std::holds_alternative<KijimaI>(model.rule)) {
        throw std::invalid_argument("check_kijima1_conditions: model rule is " + describe(model.rule) +
                                    ", expected KijimaI");
    }
    HypothesisReport report;
    report.subject = "KijimaI with base " + model.base.describe() + ", T " + T.law.describe();
    report.add(aging_condition("T-DFR", check_aging_class(T.law, AgingMode::DFR, grid)));
    report.add(aging_condition("X1-IFR", check_aging_class(model.base, AgingMode::IFR, grid)));

    Condition atom;
    atom.label = "no-atom-0";
    const double mass = model.base.atom_at_zero();
    atom.status = mass > 0.0 ? Status::Violated : Status::Holds;
    atom.detail = "P(X1 = 0) = " + std::to_string(mass);
    if (mass > 0.0) atom.witness = {{"atom", mass}};
    report.add(std::move(atom));

    Condition indep;
    indep.label = "A-independent";
    indep.status = Status::Holds;
    indep.detail = std::holds_alternative<IidRandom>(model.policy)
                       ? "A_{n+1} drawn from a fresh stream before X_{n+1}, independent of X_1..X_n"
                       : "deterministic degrees";
    report.add(std::move(indep));
    if (allows_worse_repair(model.policy)) report.notes.push_back("repair degrees above 1 (worse repair) possible");
    return report;
}

AssociationEstimate empirical_association(const VectorSampler& sampler, const VectorFunction& f,
                                          const VectorFunction& g, std::size_t n, std::uint64_t seed) {
    if (n < 1000) throw DomainError("empirical_association: need at least 1000 draws");
    std::vector<double> fv(n), gv(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(seed, streams::kAssociation + i);
        const std::vector<double> draw = sampler(rng);
        fv[i] = f(draw);
        gv[i] = g(draw);
    }
    const double count = static_cast<double>(n);
    double fm = 0.0, gm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fm += fv[i];
        gm += gv[i];
    }
    fm /= count;
    gm /= count;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += (fv[i] - fm) * (gv[i] - gm);
    const double mean_product = sum / count;
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (fv[i] - fm) * (gv[i] - gm) - mean_product;
        spread += d * d;
    }
    AssociationEstimate est;
    est.n = n;
    est.cov = sum / (count - 1.0);
    est.se = std::sqrt(spread / (count - 1.0) / count);
    return est;
}

bool association_refuted(const AssociationEstimate& est, double alpha) {
    return est.cov < -normal_quantile(1.0 - alpha) * est.se;
}

std::vector<FunctionPair> default_pair_battery() {
    std::vector<FunctionPair> battery;
    battery.push_back({"(x,y)", [](std::span<const double> v) { return v[0]; },
                       [](std::span<const double> v) { return v[1]; }});
    battery.push_back({"(x+y,x+y)", [](std::span<const double> v) { return v[0] + v[1]; },
                       [](std::span<const double> v) { return v[0] + v[1]; }});
    battery.push_back({"(x,x+y)", [](std::span<const double> v) { return v[0]; },
                       [](std::span<const double> v) { return v[0] + v[1]; }});
    // Coordinates are nonnegative, so products are increasing.
    battery.push_back({"(xy,x)", [](std::span<const double> v) { return v[0] * v[1]; },
                       [](std::span<const double> v) { return v[0]; }});
    return battery;
}

namespace {

Condition association_condition(std::string label, const AssociationEstimate& est, double alpha) {
    Condition c;
    c.label = std::move(label);
    c.witness = {{"cov", est.cov}, {"se", est.se}};
    if (association_refuted(est, alpha)) {
        c.status = Status::Violated;
        c.detail = "covariance significantly negative: association refuted";
    } else {
        c.status = Status::Inconclusive;
        c.detail = "not refuted (association cannot be confirmed by sampling)";
    }
    return c;
}

}  // namespace

HypothesisReport check_cassoc_conditions(const CountingProcess& process, const RandomTime& T,
                                         const CassocOptions& options) {
    HypothesisReport report;
    report.subject = "association route for " + process.name;
    report.notes.push_back("association is refutation-only: a clean run is PARTIAL");

    report.add(aging_condition("a:T-DFR", check_aging_class(T.law, AgingMode::DFR, options.t_grid)));

    const HistoryKernel k0 = process.kernel(0);
    const HistoryKernel k1 = process.kernel(1);
    const Lifetime x1 = k0.at({});
    Condition atom;
    atom.label = "b:no-common-atom-0";
    const double mx = x1.atom_at_zero();
    const double mt = T.law.atom_at_zero();
    atom.status = (mx > 0.0 && mt > 0.0) ? Status::Violated : Status::Holds;
    atom.detail = "P(X1=0) = " + std::to_string(mx) + ", P(T=0) = " + std::to_string(mt);
    report.add(std::move(atom));

    {
        const auto s_x2 = second_marginal_survival(k0, k1, {}, options.t_grid);
        const auto v = st_compare_values(s_x2, survival_on(x1, options.t_grid), options.t_grid);
        report.add(order_condition("c:ST(X2,X1)", v, "X2 vs X1"));
    }

    const std::size_t dims = options.unconditional_dims;
    const VectorSampler unconditional = [&process, dims](RngStream& rng) { return process.sample(dims, rng); };
    const double alpha_u = options.alpha / static_cast<double>(std::max<std::size_t>(1, options.unconditional.size()));
    for (const auto& pair : options.unconditional) {
        const auto est = empirical_association(unconditional, pair.f, pair.g, options.samples, options.seed);
        report.add(association_condition("c:assoc" + pair.label, est, alpha_u));
    }

    for (std::size_t n = 1; n <= options.depth; ++n) {
        const HistoryKernel kn = process.kernel(n);
        const HistoryKernel kn1 = process.kernel(n + 1);
        const ComposedKernel ck = compose(kn, kn1);
        Condition order;
        order.label = "d:ST[n=" + std::to_string(n) + "]";
        order.status = Status::Holds;
        std::size_t checked = 0;
        Condition worst_assoc;
        bool assoc_refuted = false;
        std::size_t assoc_checked = 0;
        for (const auto& x : grid_histories(options.history_grid, n)) {
            if (!kn.contains(x)) continue;
            ++checked;
            if (order.status != Status::Violated) {
                const auto s_next = second_marginal_survival(kn, kn1, x, options.t_grid);
                const auto v = st_compare_values(s_next, survival_on(kn.at(x), options.t_grid), options.t_grid);
                if (!is_st_le(v.order)) {
                    order = order_condition(order.label, v, "Z_{n+2} vs Z_{n+1} at " + history_text(x));
                }
            }
            if (n == 1 && !assoc_refuted) {
                const VectorSampler conditional = [&ck, &x](RngStream& rng) {
                    const JointDraw d = sample_joint(ck, x, rng);
                    return std::vector<double>{d.first, d.second};
                };
                for (const auto& pair : options.conditional) {
                    ++assoc_checked;
                    const auto est =
                        empirical_association(conditional, pair.f, pair.g, options.conditional_samples, options.seed);
                    if (association_refuted(est, options.alpha)) {
                        worst_assoc = association_condition("d:assoc" + pair.label, est, options.alpha);
                        worst_assoc.witness.push_back({"x1", x[0]});
                        assoc_refuted = true;
                        break;
                    }
                }
            }
        }
        if (checked == 0) {
            order.status = Status::Inconclusive;
            order.detail = "no grid history inside the kernel domain";
        } else if (order.status == Status::Holds) {
            order.detail = std::to_string(checked) + " grid histories checked";
        }
        report.add(std::move(order));
        if (n == 1 && !options.conditional.empty()) {
            if (assoc_refuted) {
                report.add(std::move(worst_assoc));
            } else {
                Condition c;
                c.label = "d:assoc[n=1]";
                c.status = Status::Inconclusive;
                c.detail = std::to_string(assoc_checked) + " conditional pairs sampled, none refuted";
                report.add(std::move(c));
            }
        }
    }
    return report;
}

PrconConclusion prcon_conclusion(const CountingProcess& process, const RandomTime& T, double tol) {
    const ComposedKernel ck = compose(process.kernel(0), process.kernel(1));
    const auto st = [&T](double t) { return T.law.survival(t); };
    const double first = expect_first(ck, {}, st, tol);
    PrconConclusion out;
    out.lhs = first * first;
    out.rhs = expect_sum(ck, {}, st, tol) * T.law.survival(0.0);
    out.holds = out.lhs <= out.rhs + 4.0 * tol;
    return out;
}

}  // namespace dfr
