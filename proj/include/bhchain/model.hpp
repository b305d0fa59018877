#pragma once

#include "bhchain/params.hpp"
#include "bhchain/state.hpp"

namespace bhchain {

/// Chain energy in (P, Q) coordinates.
double hamiltonian_pq(const PQState& s, const ChainParams& p);

/// Chain energy H0(I) + J H1(I, phi) in action-angle coordinates. Throws on
/// negative actions.
double hamiltonian_action_angle(const ActionAngleState& s, const ChainParams& p);

/// Equations of motion in (P, Q); writes (dP/dt, dQ/dt) into deriv.
void eom_pq(const PQState& s, const ChainParams& p, PQState& deriv);
PQState eom_pq(const PQState& s, const ChainParams& p);

/// Equations of motion in (I, phi). Throws AngleSingularity when any action
/// is at or below eps_floor; integrate in (P, Q) in that case.
void eom_action_angle(const ActionAngleState& s, const ChainParams& p,
                      ActionAngleState& deriv, double eps_floor = 1e-12);
ActionAngleState eom_action_angle(const ActionAngleState& s, const ChainParams& p,
                                  double eps_floor = 1e-12);

/// Jacobian of eom_pq at `s` applied to the tangent vector `variation`.
void variational_rhs(const PQState& s, const PQState& variation,
                     const ChainParams& p, PQState& deriv);
PQState variational_rhs(const PQState& s, const PQState& variation,
                        const ChainParams& p);

namespace detail {
void require_dims(int got, int want, const char* where);
}

}  // namespace bhchain
