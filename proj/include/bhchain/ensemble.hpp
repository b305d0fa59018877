#pragma once

#include <cstdint>
#include <vector>

#include "bhchain/integrate.hpp"
#include "bhchain/params.hpp"
#include "bhchain/state.hpp"

namespace bhchain {

enum class EnsembleDist { Uniform, Gaussian };
enum class AngleInit { FixedBase, UniformRandom };

/// Population of orbits drawn from a distribution sharply peaked at the base
/// point (I0, phi0). Occupied sites get additive action noise of scale
/// `width` (clipped at the action floor); empty sites stay at the floor so
/// the spreading of the population is seeded by the dynamics, not by the
/// sampler. Angles are either the base angles (plus width-scale noise) or
/// uniform on [0, 2*pi).
///
/// By default each member keeps the constraint value of its own draw
/// (|C - norm| = O(width)), which preserves the member-to-member spread of
/// the peak actions; `renormalize` instead rescales every draw onto the
/// constraint sphere exactly, at the cost of pinning the peak action when a
/// single site carries all the mass.
struct EnsembleSpec {
    ActionAngleState base;
    EnsembleDist dist = EnsembleDist::Gaussian;
    double width = 1e-3;
    int count = 100;
    std::uint64_t seed = 0;
    AngleInit angle_init = AngleInit::UniformRandom;
    double action_floor = 1e-12;  // near-empty sites start here, not at 0
    bool renormalize = false;

    void validate() const;
};

std::vector<PQState> make_ensemble(const EnsembleSpec& spec, const ChainParams& params);

/// Per-site action mean and variance vs time for a population of orbits.
/// var/mean are row-major [time][site]. Samples past valid_until (earliest
/// member constraint breach) are dropped.
struct VarianceSeries {
    int L = 0;
    int count = 0;
    std::vector<double> times;
    std::vector<double> mean;  // times.size() x L
    std::vector<double> var;   // times.size() x L
    double valid_until = 0.0;

    double mean_at(std::size_t it, int site) const { return mean[it * L + site]; }
    double var_at(std::size_t it, int site) const { return var[it * L + site]; }
};

VarianceSeries evolve_ensemble(const std::vector<PQState>& members,
                               const ChainParams& params, const IntegratorConfig& cfg,
                               int workers = 0);

}  // namespace bhchain
