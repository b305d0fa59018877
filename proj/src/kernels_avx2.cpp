#include "bhchain/kernels.hpp"

#if defined(BHCHAIN_BUILD_AVX2)

#include <immintrin.h>

// AVX2 variants of the inner-loop kernels. The element-wise operation trees
// mirror the scalar reference exactly and deliberately avoid FMA, so each
// lane rounds identically to the scalar code; the boundary sites and the
// vector tail fall back to the scalar expressions.

namespace bhchain::kernels::avx2 {

namespace {

inline void eom_one(const double* P, const double* Q, double* dP, double* dQ,
                    int j, double Pm, double Pp, double Qm, double Qp,
                    double J, double halfU, double mu) {
    const double w = halfU * (P[j] * P[j] + Q[j] * Q[j]) - mu;
    dP[j] = Q[j] * w - J * (Qm + Qp);
    dQ[j] = J * (Pm + Pp) - P[j] * w;
}

inline void var_one(const double* P, const double* Q,
                    const double* vP, const double* vQ,
                    double* dvP, double* dvQ,
                    int j, double vPm, double vPp, double vQm, double vQp,
                    double J, double halfU, double U, double mu) {
    const double w = halfU * (P[j] * P[j] + Q[j] * Q[j]) - mu;
    const double g = U * (P[j] * vP[j] + Q[j] * vQ[j]);
    dvP[j] = vQ[j] * w + Q[j] * g - J * (vQm + vQp);
    dvQ[j] = J * (vPm + vPp) - vP[j] * w - P[j] * g;
}

}  // namespace

void eom_rhs(const double* P, const double* Q, double* dP, double* dQ,
             int L, double J, double U, double mu, bool periodic) {
    const double halfU = 0.5 * U;
    const __m256d vJ = _mm256_set1_pd(J);
    const __m256d vhalfU = _mm256_set1_pd(halfU);
    const __m256d vmu = _mm256_set1_pd(mu);

    int j = 1;
    for (; j + 4 <= L - 1; j += 4) {
        const __m256d p = _mm256_loadu_pd(P + j);
        const __m256d q = _mm256_loadu_pd(Q + j);
        const __m256d pm = _mm256_loadu_pd(P + j - 1);
        const __m256d pp = _mm256_loadu_pd(P + j + 1);
        const __m256d qm = _mm256_loadu_pd(Q + j - 1);
        const __m256d qp = _mm256_loadu_pd(Q + j + 1);

        const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(p, p), _mm256_mul_pd(q, q));
        const __m256d w = _mm256_sub_pd(_mm256_mul_pd(vhalfU, r2), vmu);

        const __m256d dp = _mm256_sub_pd(_mm256_mul_pd(q, w),
                                         _mm256_mul_pd(vJ, _mm256_add_pd(qm, qp)));
        const __m256d dq = _mm256_sub_pd(_mm256_mul_pd(vJ, _mm256_add_pd(pm, pp)),
                                         _mm256_mul_pd(p, w));
        _mm256_storeu_pd(dP + j, dp);
        _mm256_storeu_pd(dQ + j, dq);
    }
    for (; j < L - 1; ++j)
        eom_one(P, Q, dP, dQ, j, P[j - 1], P[j + 1], Q[j - 1], Q[j + 1], J, halfU, mu);

    // boundary sites
    if (periodic) {
        eom_one(P, Q, dP, dQ, 0, P[L - 1], L > 1 ? P[1] : P[0],
                Q[L - 1], L > 1 ? Q[1] : Q[0], J, halfU, mu);
        if (L > 1)
            eom_one(P, Q, dP, dQ, L - 1, P[L - 2], P[0], Q[L - 2], Q[0], J, halfU, mu);
    } else {
        eom_one(P, Q, dP, dQ, 0, 0.0, L > 1 ? P[1] : 0.0, 0.0, L > 1 ? Q[1] : 0.0, J, halfU, mu);
        if (L > 1)
            eom_one(P, Q, dP, dQ, L - 1, P[L - 2], 0.0, Q[L - 2], 0.0, J, halfU, mu);
    }
}

void eom_var_rhs(const double* P, const double* Q,
                 const double* vP, const double* vQ,
                 double* dvP, double* dvQ,
                 int L, double J, double U, double mu, bool periodic) {
    const double halfU = 0.5 * U;
    const __m256d vJ = _mm256_set1_pd(J);
    const __m256d vhalfU = _mm256_set1_pd(halfU);
    const __m256d vU = _mm256_set1_pd(U);
    const __m256d vmu = _mm256_set1_pd(mu);

    int j = 1;
    for (; j + 4 <= L - 1; j += 4) {
        const __m256d p = _mm256_loadu_pd(P + j);
        const __m256d q = _mm256_loadu_pd(Q + j);
        const __m256d tp = _mm256_loadu_pd(vP + j);
        const __m256d tq = _mm256_loadu_pd(vQ + j);
        const __m256d tpm = _mm256_loadu_pd(vP + j - 1);
        const __m256d tpp = _mm256_loadu_pd(vP + j + 1);
        const __m256d tqm = _mm256_loadu_pd(vQ + j - 1);
        const __m256d tqp = _mm256_loadu_pd(vQ + j + 1);

        const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(p, p), _mm256_mul_pd(q, q));
        const __m256d w = _mm256_sub_pd(_mm256_mul_pd(vhalfU, r2), vmu);
        const __m256d g = _mm256_mul_pd(
            vU, _mm256_add_pd(_mm256_mul_pd(p, tp), _mm256_mul_pd(q, tq)));

        const __m256d dtp = _mm256_sub_pd(
            _mm256_add_pd(_mm256_mul_pd(tq, w), _mm256_mul_pd(q, g)),
            _mm256_mul_pd(vJ, _mm256_add_pd(tqm, tqp)));
        const __m256d dtq = _mm256_sub_pd(
            _mm256_sub_pd(_mm256_mul_pd(vJ, _mm256_add_pd(tpm, tpp)),
                          _mm256_mul_pd(tp, w)),
            _mm256_mul_pd(p, g));
        _mm256_storeu_pd(dvP + j, dtp);
        _mm256_storeu_pd(dvQ + j, dtq);
    }
    for (; j < L - 1; ++j)
        var_one(P, Q, vP, vQ, dvP, dvQ, j, vP[j - 1], vP[j + 1], vQ[j - 1], vQ[j + 1],
                J, halfU, U, mu);

    if (periodic) {
        var_one(P, Q, vP, vQ, dvP, dvQ, 0, vP[L - 1], L > 1 ? vP[1] : vP[0],
                vQ[L - 1], L > 1 ? vQ[1] : vQ[0], J, halfU, U, mu);
        if (L > 1)
            var_one(P, Q, vP, vQ, dvP, dvQ, L - 1, vP[L - 2], vP[0], vQ[L - 2], vQ[0],
                    J, halfU, U, mu);
    } else {
        var_one(P, Q, vP, vQ, dvP, dvQ, 0, 0.0, L > 1 ? vP[1] : 0.0,
                0.0, L > 1 ? vQ[1] : 0.0, J, halfU, U, mu);
        if (L > 1)
            var_one(P, Q, vP, vQ, dvP, dvQ, L - 1, vP[L - 2], 0.0, vQ[L - 2], 0.0,
                    J, halfU, U, mu);
    }
}

}  // namespace bhchain::kernels::avx2

#endif  // BHCHAIN_BUILD_AVX2
