#pragma once

#include <vector>
#include <cstddef>

#include "bhchain/params.hpp"

namespace bhchain {

/// Phase-space point in canonical (P, Q) coordinates, one pair per site.
struct PQState {
    std::vector<double> P, Q;

    PQState() = default;
    explicit PQState(int L) : P(L, 0.0), Q(L, 0.0) {}

    int size() const { return static_cast<int>(P.size()); }
};

/// Phase-space point in action-angle coordinates: I_j is the classical
/// occupation number of site j, phi_j its conjugate angle in [0, 2*pi).
struct ActionAngleState {
    std::vector<double> I, phi;

    ActionAngleState() = default;
    explicit ActionAngleState(int L) : I(L, 0.0), phi(L, 0.0) {}

    int size() const { return static_cast<int>(I.size()); }
};

/// Number constraint: (1/2) sum_j (P_j^2 + Q_j^2).
double constraint_value(const PQState& s);

/// I_j = (P_j^2 + Q_j^2)/2, phi_j = atan2(P_j, Q_j) mod 2*pi.
/// Convention: phi_j = 0 when I_j = 0 (the angle is pure gauge there).
ActionAngleState pq_to_action_angle(const PQState& s);

/// P_j = sqrt(2 I_j) sin(phi_j), Q_j = sqrt(2 I_j) cos(phi_j). Actions must be
/// nonnegative.
PQState action_angle_to_pq(const ActionAngleState& s);

/// Time-sampled orbit with energy and constraint diagnostics at every sample.
struct Trajectory {
    std::vector<double> times;
    std::vector<PQState> states;
    std::vector<double> energy;
    std::vector<double> constraint;

    std::size_t size() const { return times.size(); }
};

}  // namespace bhchain
