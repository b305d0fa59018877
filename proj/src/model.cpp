#include "bhchain/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bhchain/errors.hpp"
#include "bhchain/kernels.hpp"

namespace bhchain {

namespace detail {
void require_dims(int got, int want, const char* where) {
    if (got != want)
        throw std::invalid_argument(std::string(where) + ": state has " +
                                    std::to_string(got) + " sites, params say " +
                                    std::to_string(want));
}
}  // namespace detail

double hamiltonian_pq(const PQState& s, const ChainParams& p) {
    detail::require_dims(s.size(), p.L, "hamiltonian_pq");
    return kernels::energy(s.P.data(), s.Q.data(), p.L, p.J, p.U, p.mu, p.periodic());
}

double hamiltonian_action_angle(const ActionAngleState& s, const ChainParams& p) {
    detail::require_dims(s.size(), p.L, "hamiltonian_action_angle");
    double h0 = 0.0;
    for (int j = 0; j < p.L; ++j) {
        if (s.I[j] < 0.0)
            throw std::domain_error("hamiltonian_action_angle: negative action");
        h0 += 0.5 * p.U * s.I[j] * s.I[j] - p.mu * s.I[j];
    }
    double h1 = 0.0;
    const int nb = p.periodic() ? p.L : p.L - 1;
    for (int j = 0; j < nb; ++j) {
        const int k = (j + 1 == p.L) ? 0 : j + 1;
        h1 -= 2.0 * std::sqrt(s.I[j] * s.I[k]) * std::cos(s.phi[j] - s.phi[k]);
    }
    return h0 + p.J * h1;
}

void eom_pq(const PQState& s, const ChainParams& p, PQState& deriv) {
    detail::require_dims(s.size(), p.L, "eom_pq");
    deriv.P.resize(p.L);
    deriv.Q.resize(p.L);
    kernels::table().eom_rhs(s.P.data(), s.Q.data(), deriv.P.data(), deriv.Q.data(),
                             p.L, p.J, p.U, p.mu, p.periodic());
}

PQState eom_pq(const PQState& s, const ChainParams& p) {
    PQState d;
    eom_pq(s, p, d);
    return d;
}

// phi_dot_j = -mu + U I_j - J ( sqrt(I_{j-1}/I_j) cos(phi_j - phi_{j-1})
//                             + sqrt(I_{j+1}/I_j) cos(phi_j - phi_{j+1}) )
// I_dot_j   = 2 J ( sqrt(I_j I_{j-1}) sin(phi_{j-1} - phi_j)
//                 + sqrt(I_j I_{j+1}) sin(phi_{j+1} - phi_j) )
void eom_action_angle(const ActionAngleState& s, const ChainParams& p,
                      ActionAngleState& deriv, double eps_floor) {
    detail::require_dims(s.size(), p.L, "eom_action_angle");
    const int L = p.L;
    for (int j = 0; j < L; ++j) {
        if (s.I[j] <= eps_floor)
            throw AngleSingularity("eom_action_angle: I_" + std::to_string(j + 1) +
                                   " <= floor; use (P,Q) integration");
    }
    deriv.I.resize(L);
    deriv.phi.resize(L);
    const bool per = p.periodic();
    for (int j = 0; j < L; ++j) {
        double idot = 0.0;
        double coupling = 0.0;
        const bool has_left = j > 0 || per;
        const bool has_right = j < L - 1 || per;
        if (has_left) {
            const int k = (j == 0) ? L - 1 : j - 1;
            idot += std::sqrt(s.I[j] * s.I[k]) * std::sin(s.phi[k] - s.phi[j]);
            coupling += std::sqrt(s.I[k] / s.I[j]) * std::cos(s.phi[j] - s.phi[k]);
        }
        if (has_right) {
            const int k = (j == L - 1) ? 0 : j + 1;
            idot += std::sqrt(s.I[j] * s.I[k]) * std::sin(s.phi[k] - s.phi[j]);
            coupling += std::sqrt(s.I[k] / s.I[j]) * std::cos(s.phi[j] - s.phi[k]);
        }
        deriv.I[j] = 2.0 * p.J * idot;
        deriv.phi[j] = -p.mu + p.U * s.I[j] - p.J * coupling;
    }
}

ActionAngleState eom_action_angle(const ActionAngleState& s, const ChainParams& p,
                                  double eps_floor) {
    ActionAngleState d;
    eom_action_angle(s, p, d, eps_floor);
    return d;
}

void variational_rhs(const PQState& s, const PQState& variation,
                     const ChainParams& p, PQState& deriv) {
    detail::require_dims(s.size(), p.L, "variational_rhs");
    detail::require_dims(variation.size(), p.L, "variational_rhs (variation)");
    deriv.P.resize(p.L);
    deriv.Q.resize(p.L);
    kernels::table().eom_var_rhs(s.P.data(), s.Q.data(),
                                 variation.P.data(), variation.Q.data(),
                                 deriv.P.data(), deriv.Q.data(),
                                 p.L, p.J, p.U, p.mu, p.periodic());
}

PQState variational_rhs(const PQState& s, const PQState& variation,
                        const ChainParams& p) {
    PQState d;
    variational_rhs(s, variation, p, d);
    return d;
}

}  // namespace bhchain
