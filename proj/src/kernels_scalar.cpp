#include "bhchain/kernels.hpp"

namespace bhchain::kernels::scalar {

// dP_j/dt = -J (Q_{j-1} + Q_{j+1}) + Q_j (U/2 (P_j^2 + Q_j^2) - mu)
// dQ_j/dt =  J (P_{j-1} + P_{j+1}) - P_j (U/2 (P_j^2 + Q_j^2) - mu)
// Hard-wall: missing neighbors contribute 0. Periodic: indices wrap.
void eom_rhs(const double* P, const double* Q, double* dP, double* dQ,
             int L, double J, double U, double mu, bool periodic) {
    const double halfU = 0.5 * U;
    for (int j = 0; j < L; ++j) {
        double Pm, Pp, Qm, Qp;
        if (j > 0) { Pm = P[j - 1]; Qm = Q[j - 1]; }
        else if (periodic) { Pm = P[L - 1]; Qm = Q[L - 1]; }
        else { Pm = 0.0; Qm = 0.0; }
        if (j < L - 1) { Pp = P[j + 1]; Qp = Q[j + 1]; }
        else if (periodic) { Pp = P[0]; Qp = Q[0]; }
        else { Pp = 0.0; Qp = 0.0; }

        const double w = halfU * (P[j] * P[j] + Q[j] * Q[j]) - mu;
        dP[j] = Q[j] * w - J * (Qm + Qp);
        dQ[j] = J * (Pm + Pp) - P[j] * w;
    }
}

// Tangent map: linearization of eom_rhs at (P, Q) applied to (vP, vQ).
//   d(vP_j) = -J (vQ_{j-1} + vQ_{j+1}) + vQ_j w_j + Q_j U (P_j vP_j + Q_j vQ_j)
//   d(vQ_j) =  J (vP_{j-1} + vP_{j+1}) - vP_j w_j - P_j U (P_j vP_j + Q_j vQ_j)
void eom_var_rhs(const double* P, const double* Q,
                 const double* vP, const double* vQ,
                 double* dvP, double* dvQ,
                 int L, double J, double U, double mu, bool periodic) {
    const double halfU = 0.5 * U;
    for (int j = 0; j < L; ++j) {
        double vPm, vPp, vQm, vQp;
        if (j > 0) { vPm = vP[j - 1]; vQm = vQ[j - 1]; }
        else if (periodic) { vPm = vP[L - 1]; vQm = vQ[L - 1]; }
        else { vPm = 0.0; vQm = 0.0; }
        if (j < L - 1) { vPp = vP[j + 1]; vQp = vQ[j + 1]; }
        else if (periodic) { vPp = vP[0]; vQp = vQ[0]; }
        else { vPp = 0.0; vQp = 0.0; }

        const double w = halfU * (P[j] * P[j] + Q[j] * Q[j]) - mu;
        const double g = U * (P[j] * vP[j] + Q[j] * vQ[j]);
        dvP[j] = vQ[j] * w + Q[j] * g - J * (vQm + vQp);
        dvQ[j] = J * (vPm + vPp) - vP[j] * w - P[j] * g;
    }
}

}  // namespace bhchain::kernels::scalar

namespace bhchain::kernels {

// H = sum_j' [ -J (Q_j Q_{j+1} + P_j P_{j+1}) + U/8 (Q_j^2 + P_j^2)^2
//              - mu/2 (Q_j^2 + P_j^2) ]
// The primed sum couples j=L back to j=1 only for periodic boundaries.
double energy(const double* P, const double* Q, int L,
              double J, double U, double mu, bool periodic) {
    double h = 0.0;
    for (int j = 0; j < L; ++j) {
        const double r2 = P[j] * P[j] + Q[j] * Q[j];
        h += (0.125 * U * r2 - 0.5 * mu) * r2;
    }
    const int nb = periodic ? L : L - 1;
    for (int j = 0; j < nb; ++j) {
        const int k = (j + 1 == L) ? 0 : j + 1;
        h -= J * (Q[j] * Q[k] + P[j] * P[k]);
    }
    return h;
}

double constraint(const double* P, const double* Q, int L) {
    double c = 0.0;
    for (int j = 0; j < L; ++j) c += P[j] * P[j] + Q[j] * Q[j];
    return 0.5 * c;
}

}  // namespace bhchain::kernels
