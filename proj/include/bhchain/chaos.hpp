#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bhchain/integrate.hpp"
#include "bhchain/params.hpp"
#include "bhchain/state.hpp"

namespace bhchain {

enum class LyapunovMode { PerSite, MaxOnly, Spectrum };

struct LyapunovConfig {
    double t_transient = 10.0;
    double t_total = 1000.0;
    double delta0 = 1e-9;          // initial variation magnitude
    double renorm_interval = 1.0;  // time between renormalizations
    LyapunovMode mode = LyapunovMode::PerSite;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double constraint_tol = 0.01;
    std::uint64_t seed = 1;        // tangent direction initialization

    void validate() const;
};

struct LyapunovResult {
    std::vector<double> lambda_per_site;  // length L in PerSite mode (units of J)
    double lambda_max = 0.0;
    std::vector<double> spectrum;         // length 2L in Spectrum mode, descending
    // finite-time lambda_max estimates (t, lambda) sampled log-uniformly
    std::vector<std::pair<double, double>> convergence;
    bool converged = true;                // false: last-decade change of lambda_max > 10%
    IntegrationStatus status = IntegrationStatus::Completed;
    double fail_time = 0.0;
};

/// One exponent per degree of freedom: tangent vector n starts localized on
/// site n and lambda_n is its whole-norm growth rate under periodic
/// renormalization, all vectors evolved jointly with the orbit via the
/// variational equations. Site-resolved structure is a finite-time feature;
/// use moderate t_total (a few hundred 1/J) when comparing sites.
LyapunovResult lyapunov_per_site(const PQState& initial, const ChainParams& params,
                                 const LyapunovConfig& cfg);

/// Full Lyapunov spectrum from 2L tangent vectors with periodic
/// Gram-Schmidt reorthonormalization.
LyapunovResult lyapunov_spectrum(const PQState& initial, const ChainParams& params,
                                 const LyapunovConfig& cfg);

}  // namespace bhchain
