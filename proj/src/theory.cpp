#include "bhchain/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bhchain/errors.hpp"
#include "bhchain/rng.hpp"

namespace bhchain {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_site(int j, int lo, int hi, const char* where) {
    if (j < lo || j > hi)
        throw std::invalid_argument(std::string(where) + ": site index out of range");
}

void check_resonance(double a, double b, const ChainParams& p, const char* where) {
    if (std::abs(a - b) < 1e-6 * p.norm)
        throw ResonanceDivergence(std::string(where) +
                                  ": 1:1 resonance, perturbation theory fails");
}
}  // namespace

// h2_j = -(2 J^2 / U) I_j I_{j+1} / (I_j - I_{j+1})^2
double perturb_coeff_h2(const std::vector<double>& I, int j, const ChainParams& p) {
    const int L = static_cast<int>(I.size());
    check_site(j, 1, L - 1, "perturb_coeff_h2");
    if (p.U == 0.0) throw std::invalid_argument("perturb_coeff_h2: U must be nonzero");
    const double Ij = I[j - 1], Ik = I[j];
    if (Ik == 0.0 || Ij == 0.0) return 0.0;  // numerator vanishes
    check_resonance(Ij, Ik, p, "perturb_coeff_h2");
    const double d = Ij - Ik;
    return -(2.0 * p.J * p.J / p.U) * Ij * Ik / (d * d);
}

// h2tilde_j = -(2 J^2 / U) I_j sqrt(I_{j-1} I_{j+1})
//             / ((I_j - I_{j-1})^2 (I_j - I_{j+1})^2)
//             * [I_{j-1}^2 + 2 I_j^2 + I_{j+1}^2 - 2 (I_{j-1} + I_{j+1}) I_j]
double perturb_coeff_h2tilde(const std::vector<double>& I, int j, const ChainParams& p) {
    const int L = static_cast<int>(I.size());
    check_site(j, 2, L - 1, "perturb_coeff_h2tilde");
    if (p.U == 0.0) throw std::invalid_argument("perturb_coeff_h2tilde: U must be nonzero");
    const double Im = I[j - 2], Ij = I[j - 1], Ip = I[j];
    if (Ij == 0.0 || Im * Ip == 0.0) return 0.0;  // numerator vanishes
    check_resonance(Ij, Im, p, "perturb_coeff_h2tilde");
    check_resonance(Ij, Ip, p, "perturb_coeff_h2tilde");
    const double dm = Ij - Im, dp = Ij - Ip;
    const double bracket = Im * Im + 2.0 * Ij * Ij + Ip * Ip - 2.0 * (Im + Ip) * Ij;
    return -(2.0 * p.J * p.J / p.U) * Ij * std::sqrt(Im * Ip) / (dm * dm * dp * dp) *
           bracket;
}

// H_res = U I_r^2 + U I_0 I_r - 2 J sqrt(I_r (I_0 - I_r)) cos(Phi)
double resonant_hamiltonian(const ResonantPoint& p) {
    if (p.I_r < 0.0 || p.I_r > p.I_0)
        throw std::domain_error("resonant_hamiltonian: need 0 <= I_r <= I_0");
    return p.U * p.I_r * p.I_r + p.U * p.I_0 * p.I_r -
           2.0 * p.J * std::sqrt(p.I_r * (p.I_0 - p.I_r)) * std::cos(p.Phi);
}

double pendulum_timescale(double I, double J) {
    if (!(I > 0.0) || !(J > 0.0))
        throw std::domain_error("pendulum_timescale: need I > 0 and J > 0");
    return std::sqrt(I) / J;
}

double rg_exponent(int m, ExponentSeries series) {
    if (m < 0) throw std::domain_error("rg_exponent: m must be >= 0");
    return (series == ExponentSeries::FourM ? 4.0 : 2.0) * m;
}

bool DiffusionMatrix::tridiagonal(double tol) const {
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            if (std::abs(i - j) > 1 && std::abs(at(i, j)) > tol) return false;
    return true;
}

namespace {
DiffusionMatrix zero_matrix(int dim, std::string tag) {
    DiffusionMatrix m;
    m.dim = dim;
    m.elems.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    m.normalization = std::move(tag);
    return m;
}

void check_actions(const std::vector<double>& I, const ChainParams& p, const char* where) {
    if (static_cast<int>(I.size()) != p.L)
        throw std::invalid_argument(std::string(where) + ": action vector size != L");
    for (double v : I)
        if (v < 0.0) throw std::domain_error(std::string(where) + ": negative action");
}
}  // namespace

DiffusionMatrix diffusion_matrix_leading(const std::vector<double>& I,
                                         const ChainParams& p) {
    check_actions(I, p, "diffusion_matrix_leading");
    const int L = p.L;
    DiffusionMatrix m = zero_matrix(
        L - 1, "sqrt-action convention: <<adot_i adot_j>>/J^2; multiply by "
               "4 J^2 sqrt(I_i I_j) for <<Idot_i Idot_j>>");
    // rows r = 0 .. L-2 correspond to sites 1 .. L-1 (site L eliminated via
    // the constraint but its action value still enters the entries)
    for (int r = 0; r < L - 1; ++r) {
        const double left = (r > 0) ? I[r - 1] : 0.0;  // hard wall: term dropped
        const double right = I[r + 1];
        m.at(r, r) = 0.5 * (left + right);
        if (r + 1 < L - 1) {
            const double off = -0.5 * std::sqrt(I[r] * I[r + 1]);
            m.at(r, r + 1) = off;
            m.at(r + 1, r) = off;
        }
    }
    return m;
}

McDiffusionEstimate angle_average_mc(const std::vector<double>& I, const ChainParams& p,
                                     std::uint64_t samples, std::uint64_t seed) {
    check_actions(I, p, "angle_average_mc");
    if (samples < 10'000)
        throw std::invalid_argument("angle_average_mc: need at least 1e4 samples");
    const int L = p.L;
    const int dim = L - 1;

    std::vector<double> sum(static_cast<std::size_t>(dim) * dim, 0.0);
    std::vector<double> sum2(static_cast<std::size_t>(dim) * dim, 0.0);
    std::vector<double> phi(L), idot(L);
    std::vector<double> sq(L);
    for (int j = 0; j < L; ++j) sq[j] = std::sqrt(I[j]);

    SplitMix64 rng = seed_stream(seed, 0xD1FFU);
    const bool per = p.periodic();
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (int j = 0; j < L; ++j) phi[j] = rng.uniform(0.0, kTwoPi);
        for (int j = 0; j < L; ++j) {
            double d = 0.0;
            if (j > 0 || per) {
                const int k = (j == 0) ? L - 1 : j - 1;
                d += sq[j] * sq[k] * std::sin(phi[k] - phi[j]);
            }
            if (j < L - 1 || per) {
                const int k = (j == L - 1) ? 0 : j + 1;
                d += sq[j] * sq[k] * std::sin(phi[k] - phi[j]);
            }
            idot[j] = 2.0 * p.J * d;
        }
        for (int a = 0; a < dim; ++a)
            for (int b = a; b < dim; ++b) {
                const double v = idot[a] * idot[b];
                sum[a * dim + b] += v;
                sum2[a * dim + b] += v * v;
            }
    }

    McDiffusionEstimate est;
    est.samples = samples;
    est.raw = zero_matrix(dim, "raw angle average <<Idot_i Idot_j>>");
    est.normalized = zero_matrix(dim, "raw / (4 J^2 sqrt(I_i I_j)); comparable to "
                                      "diffusion_matrix_leading");
    est.stderr_ = zero_matrix(dim, "standard error of the normalized entries");
    const double n = static_cast<double>(samples);
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            const double mean = sum[a * dim + b] / n;
            const double var = std::max(sum2[a * dim + b] / n - mean * mean, 0.0);
            const double se = std::sqrt(var / n);
            est.raw.at(a, b) = est.raw.at(b, a) = mean;
            const double denom = 4.0 * p.J * p.J * sq[a] * sq[b];
            const double nm = denom > 0.0 ? mean / denom : 0.0;
            const double nse = denom > 0.0 ? se / denom : 0.0;
            est.normalized.at(a, b) = est.normalized.at(b, a) = nm;
            est.stderr_.at(a, b) = est.stderr_.at(b, a) = nse;
        }
    return est;
}

std::vector<double> langevin_sigma_offdiag(const std::vector<double>& I,
                                           const ChainParams& p) {
    check_actions(I, p, "langevin_sigma_offdiag");
    std::vector<double> out(p.L);
    for (int i = 0; i < p.L; ++i) {
        const double ui = p.U * I[i];
        out[i] = ui * (2.0 * p.mu - ui) /
                 (p.J * p.J + (p.mu - ui) * (p.mu - ui));
    }
    return out;
}

DiffusionMatrix diffusion_matrix_langevin(const std::vector<double>& I,
                                          const ChainParams& p) {
    check_actions(I, p, "diffusion_matrix_langevin");
    const int L = p.L;
    const int dim = L - 1;

    // g0: row i couples to noise components i-1 and i+1 with -a_{i-1}, +a_{i+1}
    std::vector<double> a(L);
    for (int j = 0; j < L; ++j) a[j] = std::sqrt(I[j]);
    std::vector<double> g(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int r = 0; r < dim; ++r) {
        if (r - 1 >= 0) g[r * dim + (r - 1)] = -p.J * a[r - 1];
        if (r + 1 < dim) g[r * dim + (r + 1)] = p.J * a[r + 1];
    }

    // sigma2: tridiagonal, unit diagonal; adjacent entries symmetrized from
    // the one-sided values f(I_i)
    const std::vector<double> f = langevin_sigma_offdiag(I, p);
    std::vector<double> s(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        s[i * dim + i] = 1.0;
        if (i + 1 < dim) {
            const double off = 0.5 * (f[i] + f[i + 1]);
            s[i * dim + (i + 1)] = off;
            s[(i + 1) * dim + i] = off;
        }
    }

    // D = g sigma2 g^T
    DiffusionMatrix m = zero_matrix(
        dim, "sqrt-action variables per unit time: <Delta a_n Delta a_m> ~ D_nm t/2; "
             "sigma^2(I_n) growth rate ~ 2 I_n D_nn");
    std::vector<double> gs(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            const double gik = g[i * dim + k];
            if (gik == 0.0) continue;
            for (int j = 0; j < dim; ++j) gs[i * dim + j] += gik * s[k * dim + j];
        }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double v = 0.0;
            for (int k = 0; k < dim; ++k) v += gs[i * dim + k] * g[j * dim + k];
            m.at(i, j) = v;
        }
    return m;
}

std::vector<double> variance_growth_rates_langevin(const std::vector<double>& I,
                                                   const ChainParams& p) {
    const DiffusionMatrix D = diffusion_matrix_langevin(I, p);
    std::vector<double> out(p.L, 0.0);
    for (int n = 0; n < p.L - 1; ++n) out[n] = 2.0 * I[n] * D.at(n, n);
    // the eliminated site: Delta I_L = -sum_{n<L} Delta I_n, so its variance
    // rate is the full contraction 2 sum_{nm} a_n a_m D_nm
    double s = 0.0;
    for (int n = 0; n < p.L - 1; ++n)
        for (int m = 0; m < p.L - 1; ++m)
            s += std::sqrt(I[n] * I[m]) * D.at(n, m);
    out[p.L - 1] = 2.0 * s;
    return out;
}

DnseSolution dnse_homogeneous(double I0, const ChainParams& p,
                              const std::vector<double>& times) {
    if (!(p.mu > 0.0)) throw std::domain_error("dnse_homogeneous: need mu > 0");
    if (!(I0 > 0.0)) throw std::domain_error("dnse_homogeneous: need I0 > 0");
    if (p.U < 0.0) throw std::domain_error("dnse_homogeneous: need U >= 0");

    DnseSolution out;
    out.times = times;
    out.f.reserve(times.size());
    out.action.reserve(times.size());

    const double A = p.mu / I0 - p.U;
    const double dscale = std::max(std::abs(A) + p.U, 1e-30);
    // the denominator has a zero iff A = U, i.e. mu / I0 = 2 U
    if (std::abs(A - p.U) <= 1e-9 * dscale) out.branch_crossing = true;
    std::complex<double> prev(1.0, 0.0);
    for (double t : times) {
        const std::complex<double> e(std::cos(2.0 * p.mu * t), std::sin(2.0 * p.mu * t));
        const std::complex<double> D = A * e + p.U;
        if (std::abs(D) < 1e-6 * dscale) out.branch_crossing = true;
        std::complex<double> fr = std::sqrt(p.mu) / std::sqrt(D);
        // principal branch with continuity tracking across the cut
        if ((fr.real() * prev.real() + fr.imag() * prev.imag()) < 0.0) fr = -fr;
        prev = fr;
        out.f.push_back(fr);
        out.action.push_back(std::norm(fr));
    }
    return out;
}

}  // namespace bhchain
