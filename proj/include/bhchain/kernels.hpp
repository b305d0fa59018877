#pragma once

#include <cstddef>
#include <string>

// Low-level arithmetic kernels for the chain equations of motion. These are
// the inner loops of every integration; a scalar reference implementation is
// always available and an AVX2 variant is selected at runtime when the CPU
// supports it. The vector variants use the same per-element operation order
// as the scalar code (and no FMA), so results are bit-identical across
// backends; the equivalence tests assert exactly that.

namespace bhchain::kernels {

enum class Backend { Scalar, Avx2 };

/// Backend chosen at startup. Honors BHCHAIN_SIMD=scalar|avx2|auto.
Backend active_backend();
const char* backend_name();
bool avx2_compiled_in();

struct KernelTable {
    // (dP, dQ) <- equations of motion evaluated at (P, Q)
    void (*eom_rhs)(const double* P, const double* Q, double* dP, double* dQ,
                    int L, double J, double U, double mu, bool periodic);
    // (dvP, dvQ) <- Jacobian of the equations of motion at (P, Q) applied to
    // the tangent vector (vP, vQ)
    void (*eom_var_rhs)(const double* P, const double* Q,
                        const double* vP, const double* vQ,
                        double* dvP, double* dvQ,
                        int L, double J, double U, double mu, bool periodic);
};

const KernelTable& table();

// Scalar reference kernels, always available (used directly by the
// equivalence tests and as the dispatch fallback).
namespace scalar {
void eom_rhs(const double* P, const double* Q, double* dP, double* dQ,
             int L, double J, double U, double mu, bool periodic);
void eom_var_rhs(const double* P, const double* Q,
                 const double* vP, const double* vQ,
                 double* dvP, double* dvQ,
                 int L, double J, double U, double mu, bool periodic);
}  // namespace scalar

#if defined(BHCHAIN_BUILD_AVX2)
namespace avx2 {
void eom_rhs(const double* P, const double* Q, double* dP, double* dQ,
             int L, double J, double U, double mu, bool periodic);
void eom_var_rhs(const double* P, const double* Q,
                 const double* vP, const double* vQ,
                 double* dvP, double* dvQ,
                 int L, double J, double U, double mu, bool periodic);
}  // namespace avx2
#endif

// Reductions are cold paths (once per sample / accepted step); they stay
// scalar so that summation order is fixed everywhere.
double energy(const double* P, const double* Q, int L,
              double J, double U, double mu, bool periodic);
double constraint(const double* P, const double* Q, int L);

}  // namespace bhchain::kernels
