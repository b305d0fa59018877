#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "bhchain/params.hpp"
#include "bhchain/state.hpp"

namespace bhchain {

/// Logarithmically spaced sample times covering [t_min, t_end], deduplicated,
/// always including t_end.
std::vector<double> log_schedule(double t_min, double t_end, int points_per_decade);

enum class IntegrationMode { Unconstrained, Projected };

// Default tolerances are set by the conservation budget: DP5 energy drift
// grows ~ tol * t, and 3e-15 keeps the relative drift under 1e-8 to t = 1e4
// (and J=0 actions constant to 1e-12 over t = 1e3). Ensemble workloads that
// only need the 1% constraint budget typically run at 1e-9.
struct IntegratorConfig {
    double rel_tol = 3e-15;
    double abs_tol = 3e-15;
    double t_end = 0.0;
    std::vector<double> sample_times;  // increasing, within [0, t_end]; empty = {0, t_end}
    double constraint_tol = 0.01;      // max allowed |C - norm| / norm
    IntegrationMode mode = IntegrationMode::Unconstrained;
    double h_max = 0.0;                // 0 = uncapped
    std::uint64_t max_steps = 500'000'000;

    void validate() const;
};

enum class IntegrationStatus { Completed, ConstraintBreach, StepFailure };

struct IntegrationStats {
    std::uint64_t steps_accepted = 0;
    std::uint64_t steps_rejected = 0;
    std::uint64_t rhs_evals = 0;
    double wall_time_s = 0.0;
    // largest relative constraint violation seen at accepted steps; in
    // Projected mode this is the pre-projection value
    double max_constraint_violation = 0.0;
};

struct IntegrationOutcome {
    Trajectory trajectory;
    IntegrationStatus status = IntegrationStatus::Completed;
    double fail_time = std::numeric_limits<double>::quiet_NaN();
    IntegrationStats stats;

    bool completed() const { return status == IntegrationStatus::Completed; }
};

/// Integrates the (P, Q) equations of motion from `initial`, sampling the
/// trajectory exactly at cfg.sample_times (dense output). The constraint is
/// monitored at every accepted step; when its relative violation exceeds
/// cfg.constraint_tol the integration stops and the trajectory ends at the
/// last physical sample.
IntegrationOutcome integrate_orbit(const PQState& initial, const ChainParams& params,
                                   const IntegratorConfig& cfg);

// ---------------------------------------------------------------------------
// Low-level adaptive stepper, shared by orbit and tangent-space integrations.

class OdeSystem {
public:
    virtual ~OdeSystem() = default;
    virtual int dim() const = 0;
    virtual void rhs(const double* y, double* dydt) const = 0;
};

/// Dormand-Prince 5(4) with Hairer's order-4 continuous extension. Explicit
/// coefficients are pinned here so trajectories are reproducible bit-for-bit
/// on a given platform.
class Dopri5 {
public:
    enum class StepResult { Ok, StepSizeUnderflow, MaxStepsExceeded };

    Dopri5(const OdeSystem& sys, double rel_tol, double abs_tol, double h_max = 0.0,
           std::uint64_t max_steps = 500'000'000);

    void init(const std::vector<double>& y0, double t0 = 0.0);

    /// One accepted step (internally retries rejected ones).
    StepResult step();

    /// Steps until exactly t_target (last step clamped).
    StepResult advance_to(double t_target);

    double t() const { return t_; }
    double t_prev() const { return t_prev_; }
    const std::vector<double>& y() const { return y_; }
    std::vector<double>& y_mutable() { return y_; }

    /// Refreshes the cached FSAL derivative after an external modification of
    /// y() (e.g. projection onto the constraint sphere).
    void refresh_rhs();

    /// Dense output for t_query in [t_prev(), t()].
    void interpolate(double t_query, double* out) const;

    std::uint64_t n_accepted() const { return n_accepted_; }
    std::uint64_t n_rejected() const { return n_rejected_; }
    std::uint64_t n_rhs() const { return n_rhs_; }

private:
    double initial_step() const;
    void build_dense();

    const OdeSystem& sys_;
    int n_;
    double rtol_, atol_, h_max_;
    std::uint64_t max_steps_;

    double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0, h_next_ = 0.0;
    bool have_f0_ = false;
    std::vector<double> y_, y_prev_;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_;
    std::vector<double> cont_;  // 5 * n dense-output coefficients
    std::uint64_t n_accepted_ = 0, n_rejected_ = 0, n_rhs_ = 0;
};

/// Equations of motion as an OdeSystem over y = [P_1..P_L, Q_1..Q_L].
class PQSystem : public OdeSystem {
public:
    explicit PQSystem(const ChainParams& p) : p_(p) {}
    int dim() const override { return 2 * p_.L; }
    void rhs(const double* y, double* dydt) const override;

private:
    ChainParams p_;
};

}  // namespace bhchain
