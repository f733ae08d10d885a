#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dfrkit/kernels.hpp"
#include "dfrkit/lifetime.hpp"
#include "dfrkit/rng.hpp"

namespace dfr {

// ---- repair-degree policies -------------------------------------------------

struct DeterministicConstant {
    double q = 0.0;
};

/// Degrees a_1, a_2, ...; indices past the end repeat the last entry.
struct DeterministicSequence {
    std::vector<double> degrees;
};

/// A_n i.i.d. from `law`, each drawn independently of every earlier X and A.
struct IidRandom {
    Lifetime law;
};

using RepairPolicy = std::variant<DeterministicConstant, DeterministicSequence, IidRandom>;

bool is_deterministic(const RepairPolicy& policy);
/// Degree a_n (n >= 1) of a deterministic policy; throws UnsupportedError for IidRandom.
double degree_at(const RepairPolicy& policy, std::size_t n);
/// True if any deterministic degree exceeds 1 ("worse than minimal" repair).
bool allows_worse_repair(const RepairPolicy& policy);
std::string describe(const RepairPolicy& policy);

// ---- virtual-age update rules -----------------------------------------------

struct KijimaI {};
struct KijimaII {};
struct CustomRule {
    std::string name;
    std::function<double(double, double, double)> psi;  ///< (v_prev, x, a) -> v
};

using VirtualAgeRule = std::variant<KijimaI, KijimaII, CustomRule>;

std::string describe(const VirtualAgeRule& rule);

/// KijimaI: v + a x; KijimaII: a (v + x); Custom: psi(v, x, a).
/// Negative inputs or a non-finite/negative custom result throw DomainError.
double step_virtual_age(const VirtualAgeRule& rule, double v, double x, double a);

struct VirtualAgeModel {
    Lifetime base;
    VirtualAgeRule rule;
    RepairPolicy policy;
};

/// Law of the next interarrival when the current virtual age is v.
Lifetime next_interarrival_survival(const VirtualAgeModel& model, double age);

struct Trajectory {
    std::vector<double> x;  ///< X_1..X_n
    std::vector<double> a;  ///< A_1..A_n
    std::vector<double> v;  ///< V_0..V_n
    std::vector<double> s;  ///< S_0..S_n
    /// First index k with base survival at V_k equal to 0; all later X are 0.
    std::optional<std::size_t> absorbed_at;
};

Trajectory sample_trajectory(const VirtualAgeModel& model, std::size_t n_max, RngStream& rng);

/// Allocation-free variant for estimators: writes S_0..S_n into `arrivals`
/// (size n+1) using the same draw order as sample_trajectory.
void sample_arrivals(const VirtualAgeModel& model, std::span<double> arrivals, RngStream& rng);

/// Replays the deterministic degrees over `history` to get V_n, then draws the
/// next `steps` interarrivals directly from the model.
std::vector<double> sample_continuation(const VirtualAgeModel& model, History history, std::size_t steps,
                                        RngStream& rng);

/// Virtual age after a history under a deterministic policy.
double virtual_age_after(const VirtualAgeModel& model, History history);

/// Kernel of arity n: x -> law with survival z -> S(z | Psi_n(x)). Domain:
/// finite nonnegative histories with S(V_k + x_{k+1}) > 0 at every step.
/// Throws UnsupportedError for random policies.
HistoryKernel induced_kernel(const VirtualAgeModel& model, std::size_t n);

/// The model viewed as a general counting process through its induced kernels.
CountingProcess as_process(const VirtualAgeModel& model);

/// CSV rows trajectory_id,n,x,a,v,s,seed for n = 1..len.
void write_trajectory_csv(std::ostream& os, const Trajectory& t, std::size_t trajectory_id, std::uint64_t seed);
void write_trajectory_csv_header(std::ostream& os);

}  // namespace dfr
