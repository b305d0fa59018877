#pragma once

#include <optional>
#include <vector>

#include "bhchain/ensemble.hpp"
#include "bhchain/params.hpp"
#include "bhchain/state.hpp"

namespace bhchain {

enum class ScalingClass { Even, Normal, Flat, Unclassified };
enum class ExponentSeries { FourM, TwoM };

/// Least-squares slope of log sigma^2 vs log t over one window, with its
/// classification against the quantized exponent series.
struct ScalingFit {
    int site = 0;         // 1-based
    double t_lo = 0.0, t_hi = 0.0;
    double slope = 0.0;
    double stderr_ = 0.0;
    double r2 = 0.0;
    ScalingClass cls = ScalingClass::Unclassified;
    int even_k = 0;       // valid when cls == Even

    /// True when the fit is consistent with exponent zeta (Flat counts as 0).
    bool matches_even(int zeta) const {
        if (cls == ScalingClass::Even) return even_k == zeta;
        if (cls == ScalingClass::Flat) return zeta == 0;
        return false;
    }
};

/// Classification rule: Flat if |slope| <= 0.3; Normal if |slope - 1| <= 0.3;
/// Even(k) if |slope - k| <= 0.5 with k the nearest even integer >= 0;
/// Unclassified otherwise.
ScalingClass classify_slope(double slope, int* even_k = nullptr);

ScalingFit fit_exponent(const VarianceSeries& series, int site, double t_lo, double t_hi);

struct ExponentPrediction {
    int site = 0;          // 1-based
    int m = 0;             // effective distance
    double zeta = 0.0;     // 4m or 2m
    ExponentSeries series = ExponentSeries::FourM;
    bool no_transport = false;  // periodic boundary: no transport at all
};

/// Distance rule: m = min(|n - n0|, n, L - n) over initially filled sites n0
/// (a site is filled when I >= fill_threshold_frac * max I), zeta = 4m or 2m.
/// Periodic boundaries return NoTransport markers for every site.
std::vector<ExponentPrediction> predict_exponents(const ChainParams& params,
                                                  const ActionAngleState& initial,
                                                  ExponentSeries series,
                                                  double fill_threshold_frac = 0.1);

struct Crossover {
    double t_star = 0.0;                 // end of the stable even-exponent regime
    std::optional<double> t_star2;       // start of the normal-diffusion regime
};

/// Scans local log-log slopes on half-decade windows. t_star ends the longest
/// early run holding one even-integer slope; t_star2 starts the latest run
/// with slope within 0.3 of 1. Returns nullopt when no stable even window
/// exists.
std::optional<Crossover> detect_crossover(const VarianceSeries& series, int site);

struct DiffusionFit {
    int site = 0;        // 1-based
    double D = 0.0;      // slope of sigma^2(I_n) vs t over the window
    double slope_loglog = 0.0;
    bool normal = false; // log-log slope within [0.7, 1.3]
};

/// Linear growth rate of the action variances over a window inside the
/// normal-diffusion regime. Throws WindowNotNormal when no site qualifies.
std::vector<DiffusionFit> fit_diffusion_coefficients(const VarianceSeries& series,
                                                     double t_lo, double t_hi);

}  // namespace bhchain
