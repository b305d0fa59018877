#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bhchain/params.hpp"
#include "bhchain/scaling.hpp"

namespace bhchain {

/// Second-order perturbation coefficient h2_j for the bond (j, j+1), sites
/// 1-based. Throws ResonanceDivergence near the 1:1 resonance I_j = I_{j+1}.
double perturb_coeff_h2(const std::vector<double>& I, int j, const ChainParams& p);

/// Second-order coefficient h2tilde_j coupling (j-1, j, j+1), sites 1-based.
double perturb_coeff_h2tilde(const std::vector<double>& I, int j, const ChainParams& p);

/// Effective Hamiltonian of the 1:1 resonance in the reduced variables
/// (I_r, Phi) at conserved total action I_0.
struct ResonantPoint {
    double I_r = 0.0;
    double I_0 = 0.0;
    double Phi = 0.0;
    double U = 0.0;
    double J = 0.0;
};
double resonant_hamiltonian(const ResonantPoint& p);

/// Characteristic pendulum period for transport out of a site with action I:
/// T = sqrt(I)/J (proportionality constant fixed to 1).
double pendulum_timescale(double I, double J);

/// Quantized transport exponent: 4m (FourM) or 2m (TwoM).
double rg_exponent(int m, ExponentSeries series);

/// Dense symmetric matrix of size (L-1) x (L-1) with a tag recording the
/// normalization convention of its entries.
struct DiffusionMatrix {
    int dim = 0;
    std::vector<double> elems;  // row-major dim x dim
    std::string normalization;

    double at(int i, int j) const { return elems[static_cast<std::size_t>(i) * dim + j]; }
    double& at(int i, int j) { return elems[static_cast<std::size_t>(i) * dim + j]; }
    bool tridiagonal(double tol = 0.0) const;
};

/// Leading-order (angle-averaged) diffusion matrix. Entries follow the
/// sqrt-action convention: D[i][j] = <<da_i/dt da_j/dt>> / J^2 with
/// a = sqrt(I); equivalently <<dI_i/dt dI_j/dt>> = 4 J^2 sqrt(I_i I_j) D[i][j].
/// Diagonal (I_{n-1} + I_{n+1})/2, off-diagonal -sqrt(I_n I_{n+1})/2, zero
/// beyond the first off-diagonals; site L is the constraint-eliminated one.
DiffusionMatrix diffusion_matrix_leading(const std::vector<double>& I,
                                         const ChainParams& p);

/// Monte Carlo oracle for the angle averages behind
/// diffusion_matrix_leading: draws i.i.d. uniform angles, evaluates the
/// action equations of motion and averages the products. `raw` holds
/// <<dI_i/dt dI_j/dt>>, `normalized` divides by 4 J^2 sqrt(I_i I_j), and
/// `stderr_` gives the per-entry standard error of `normalized`.
struct McDiffusionEstimate {
    DiffusionMatrix raw;
    DiffusionMatrix normalized;
    DiffusionMatrix stderr_;
    std::uint64_t samples = 0;
};
McDiffusionEstimate angle_average_mc(const std::vector<double>& I, const ChainParams& p,
                                     std::uint64_t samples, std::uint64_t seed);

/// Noise correlation entries of the Langevin model: sigma2_{ii} = 1 and
/// sigma2_{i,i+-1} = U I_i (2 mu - U I_i) / (J^2 + (mu - U I_i)^2).
/// Returns the per-site off-diagonal values f(I_i), 1-based site i.
std::vector<double> langevin_sigma_offdiag(const std::vector<double>& I,
                                           const ChainParams& p);

/// Diffusion matrix of the Langevin model: D = g0 sigma2 g0^T with g0 the
/// skew-tridiagonal noise coupling built from a = sqrt(I) (size L-1) and
/// sigma2 the tridiagonal correlation matrix (1 on the diagonal; adjacent
/// entries are the symmetrized average of the one-sided values). Entries are
/// in sqrt-action variables per unit time: <Delta a_n Delta a_m> ~ D_nm t / 2.
DiffusionMatrix diffusion_matrix_langevin(const std::vector<double>& I,
                                          const ChainParams& p);

/// Predicted linear growth rate of sigma^2(I_n) in the normal-diffusion
/// regime, from the Langevin matrix via sigma^2(I_n) ~= 4 I_n <Delta a_n^2>:
/// rate_n = 2 I_n D_nn. The last site uses the constraint-eliminated value.
std::vector<double> variance_growth_rates_langevin(const std::vector<double>& I,
                                                   const ChainParams& p);

/// Homogeneous J=0 lattice-NLS amplitude
/// f(t) = sqrt(mu) / sqrt((mu/I0 - U) e^{2 i mu t} + U), branch tracked
/// continuously along the sample sequence; |f|^2 is the predicted action.
struct DnseSolution {
    std::vector<double> times;
    std::vector<std::complex<double>> f;
    std::vector<double> action;     // |f|^2
    bool branch_crossing = false;   // denominator passed through ~0
};
DnseSolution dnse_homogeneous(double I0, const ChainParams& p,
                              const std::vector<double>& times);

}  // namespace bhchain
