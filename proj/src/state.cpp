#include "bhchain/state.hpp"

#include <cmath>
#include <stdexcept>

#include "bhchain/kernels.hpp"

namespace bhchain {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double constraint_value(const PQState& s) {
    return kernels::constraint(s.P.data(), s.Q.data(), s.size());
}

ActionAngleState pq_to_action_angle(const PQState& s) {
    const int L = s.size();
    ActionAngleState out(L);
    for (int j = 0; j < L; ++j) {
        const double I = 0.5 * (s.P[j] * s.P[j] + s.Q[j] * s.Q[j]);
        out.I[j] = I;
        if (I == 0.0) {
            out.phi[j] = 0.0;  // gauge choice at the origin
        } else {
            double phi = std::atan2(s.P[j], s.Q[j]);
            if (phi < 0.0) phi += kTwoPi;
            if (phi >= kTwoPi) phi = 0.0;
            out.phi[j] = phi;
        }
    }
    return out;
}

PQState action_angle_to_pq(const ActionAngleState& s) {
    const int L = s.size();
    PQState out(L);
    for (int j = 0; j < L; ++j) {
        if (s.I[j] < 0.0)
            throw std::domain_error("action_angle_to_pq: negative action");
        const double r = std::sqrt(2.0 * s.I[j]);
        out.P[j] = r * std::sin(s.phi[j]);
        out.Q[j] = r * std::cos(s.phi[j]);
    }
    return out;
}

}  // namespace bhchain
