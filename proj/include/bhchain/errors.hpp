#pragma once

#include <stdexcept>
#include <string>

namespace bhchain {

// Thrown by eom_action_angle when some I_j is at or below the configured
// floor: the phi-dot equation divides by sqrt(I_j), so the caller must
// integrate in (P,Q) instead.
struct AngleSingularity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Perturbation coefficients diverge at 1:1 resonances I_j = I_{j+-1}.
struct ResonanceDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowTooSparse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowNotNormal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleBase : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bhchain
