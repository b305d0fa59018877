#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhchain/chaos.hpp"
#include "bhchain/ensemble.hpp"
#include "bhchain/integrate.hpp"
#include "bhchain/params.hpp"
#include "bhchain/scaling.hpp"

namespace bhchain::run {

using json = nlohmann::ordered_json;

enum class ExperimentKind { Orbit, Lyapunov, Ensemble, Sweep, Theory };

std::string to_string(ExperimentKind k);

/// Initial-condition recipe. Sites are 1-based as in the figures.
struct InitialSpec {
    enum class Kind { FilledSites, Homogeneous, Explicit, RandomUniform };
    Kind kind = Kind::FilledSites;
    std::vector<int> sites;         // FilledSites
    std::vector<double> fillings;   // optional, default equal shares of norm
    std::vector<double> I, phi;     // Explicit
    bool random_angles = false;     // draw base angles uniformly (seeded)
    double action_floor = 1e-12;

    /// Resolves to a base action-angle state summing exactly to params.norm.
    ActionAngleState build(const ChainParams& params, std::uint64_t seed) const;
};

struct SampleSpec {
    enum class Kind { Log, Linear, Explicit };
    Kind kind = Kind::Log;
    double t_min = 0.1;
    int points_per_decade = 20;
    double dt = 0.0;                // Linear
    std::vector<double> times;      // Explicit

    std::vector<double> build(double t_end) const;
};

struct ScalingOptions {
    double window_lo = 10.0;
    double window_hi = 1000.0;
    double fill_threshold = 0.1;
    ExponentSeries series = ExponentSeries::FourM;
    bool detect_crossover = false;
};

struct SweepSpec {
    std::vector<double> U_over_J;
    std::vector<double> mu_over_J;
    ExperimentKind sub = ExperimentKind::Ensemble;
};

struct TheoryOptions {
    std::vector<double> actions;        // empty: use the initial spec
    std::uint64_t mc_samples = 0;       // 0: skip the Monte Carlo oracle
    std::optional<double> dnse_I0;      // emit dnse.csv when set
    double dnse_t_end = 10.0;
    int dnse_points = 1000;
    std::string variance_csv;           // fit-vs-prediction table input
    double fit_window_lo = 0.0, fit_window_hi = 0.0;
};

struct RunConfig {
    ExperimentKind experiment = ExperimentKind::Orbit;
    ChainParams chain;
    InitialSpec initial;
    IntegratorConfig integrator;
    SampleSpec samples;
    EnsembleSpec ensemble;   // base resolved from `initial` at run time
    LyapunovConfig lyapunov;
    SweepSpec sweep;
    ScalingOptions scaling;
    TheoryOptions theory;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int workers = 0;         // 0: BHCHAIN_WORKERS or hardware concurrency

    void validate() const;

    static RunConfig from_json(const json& j);
    json to_json() const;
};

/// Parses a config file and applies --key=value overrides (dotted paths into
/// the JSON document). Throws std::invalid_argument with a readable message.
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides);

RunConfig config_from_json_text(const std::string& text,
                                const std::vector<std::string>& overrides);

}  // namespace bhchain::run
