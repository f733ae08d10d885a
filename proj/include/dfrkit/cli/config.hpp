#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfrkit/estimate.hpp"
#include "dfrkit/survival.hpp"
#include "dfrkit/vamodels.hpp"

namespace dfr::cli {

/// Invalid or inconsistent experiment configuration; the message names the
/// offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A catalogue family with its parameters, e.g. {"family": "weibull", "shape": 2, "scale": 1}.
struct LawSpec {
    std::string family;
    std::vector<double> params;  ///< family-specific order (see README)
    std::vector<double> values;  ///< empirical sample

    Lifetime build() const;
    nlohmann::json to_json() const;
};

struct PolicySpec {
    std::string type = "constant";  ///< constant | sequence | iid
    double q = 0.0;
    std::vector<double> degrees;
    std::optional<LawSpec> law;

    RepairPolicy build() const;
};

struct ModelSpec {
    LawSpec base;
    std::string rule = "kijima1";  ///< kijima1 | kijima2
    PolicySpec policy;

    VirtualAgeModel build() const;
};

struct GridSpec {
    std::string kind = "uniform";  ///< uniform | log | quantile
    double lo = 0.0;
    double hi = 5.0;
    std::size_t count = 50;

    /// `law` is used by the quantile builder.
    Grid build(const Lifetime& law) const;
};

struct ExperimentConfig {
    std::string command;  ///< simulate | estimate | verify-dfr | hypotheses | counterexample
    std::optional<ModelSpec> model;
    std::optional<LawSpec> random_time;
    std::string estimator = "mc";  ///< mc | quad | closed
    std::string closed_form = "poisson-exp";
    std::optional<double> lambda;
    std::optional<double> mu;
    std::size_t n_max = 4;
    std::size_t n_samples = 100000;
    std::uint64_t seed = 1;
    double alpha = 0.01;
    double tol = 1e-9;
    std::size_t threads = 0;
    std::size_t chunk_size = 4096;
    GridSpec grid;
    GridSpec history_grid{"quantile", 0.0, 1.0, 8};
    std::size_t depth = 3;
    std::string check = "all";        ///< hypotheses: all | t2star | kijima1 | prcon | cassoc
    std::string name = "kijima2";     ///< counterexample: kijima2 | ber-scaled
    double p = 0.5;
    std::optional<LawSpec> w;
    std::size_t replicate_samples = 0;  ///< kijima2: Monte Carlo replication size, 0 = none
    std::string out;
    std::string format = "csv";  ///< csv | json
};

LawSpec parse_law(const nlohmann::json& j, const std::string& path);
/// Parses and validates a configuration document; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& config);

}  // namespace dfr::cli
