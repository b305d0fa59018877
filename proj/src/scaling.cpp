#include "bhchain/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bhchain/errors.hpp"

namespace bhchain {

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, stderr_slope = 0.0, r2 = 0.0;
    int n = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    f.n = static_cast<int>(x.size());
    if (f.n < 2) return f;
    double sx = 0, sy = 0;
    for (int i = 0; i < f.n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / f.n, my = sy / f.n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < f.n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (int i = 0; i < f.n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    f.stderr_slope = (f.n > 2) ? std::sqrt(ss_res / (f.n - 2) / sxx) : 0.0;
    return f;
}

}  // namespace

ScalingClass classify_slope(double slope, int* even_k) {
    if (std::abs(slope) <= 0.3) return ScalingClass::Flat;
    if (std::abs(slope - 1.0) <= 0.3) return ScalingClass::Normal;
    long k = std::lround(slope / 2.0) * 2;
    if (k < 0) k = 0;
    if (std::abs(slope - static_cast<double>(k)) <= 0.5) {
        if (even_k) *even_k = static_cast<int>(k);
        return ScalingClass::Even;
    }
    return ScalingClass::Unclassified;
}

ScalingFit fit_exponent(const VarianceSeries& series, int site, double t_lo, double t_hi) {
    if (site < 1 || site > series.L)
        throw std::invalid_argument("fit_exponent: site out of range");
    if (!(t_lo > 0.0) || !(t_hi >= 10.0 * t_lo))
        throw std::invalid_argument("fit_exponent: window must span at least one decade");

    std::vector<double> lx, ly;
    for (std::size_t it = 0; it < series.times.size(); ++it) {
        const double t = series.times[it];
        if (t < t_lo || t > t_hi) continue;
        const double v = series.var_at(it, site - 1);
        if (!(v > 0.0))
            throw NonPositiveVariance("fit_exponent: nonpositive variance in window");
        lx.push_back(std::log(t));
        ly.push_back(std::log(v));
    }
    if (lx.size() < 8)
        throw WindowTooSparse("fit_exponent: fewer than 8 samples in window");

    const LineFit lf = least_squares(lx, ly);
    ScalingFit out;
    out.site = site;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    out.slope = lf.slope;
    out.stderr_ = lf.stderr_slope;
    out.r2 = lf.r2;
    out.cls = classify_slope(lf.slope, &out.even_k);
    return out;
}

std::vector<ExponentPrediction> predict_exponents(const ChainParams& params,
                                                  const ActionAngleState& initial,
                                                  ExponentSeries series,
                                                  double fill_threshold_frac) {
    params.validate();
    if (initial.size() != params.L)
        throw std::invalid_argument("predict_exponents: dimension mismatch");
    const int L = params.L;
    std::vector<ExponentPrediction> out(L);

    if (params.periodic()) {
        for (int i = 0; i < L; ++i) {
            out[i].site = i + 1;
            out[i].series = series;
            out[i].no_transport = true;
        }
        return out;
    }

    const double imax = *std::max_element(initial.I.begin(), initial.I.end());
    std::vector<int> filled;  // 1-based
    for (int i = 0; i < L; ++i)
        if (initial.I[i] >= fill_threshold_frac * imax) filled.push_back(i + 1);

    const double factor = series == ExponentSeries::FourM ? 4.0 : 2.0;
    for (int i = 0; i < L; ++i) {
        const int n = i + 1;
        int m = std::min(n, L - n);  // chain endpoints act as filled sites
        for (int n0 : filled) m = std::min(m, std::abs(n - n0));
        out[i].site = n;
        out[i].m = m;
        out[i].zeta = factor * m;
        out[i].series = series;
    }
    return out;
}

std::optional<Crossover> detect_crossover(const VarianceSeries& series, int site) {
    if (site < 1 || site > series.L)
        throw std::invalid_argument("detect_crossover: site out of range");
    const auto& T = series.times;
    if (T.size() < 2) return std::nullopt;
    // skip a possible t=0 sample
    std::size_t first = 0;
    while (first < T.size() && !(T[first] > 0.0)) ++first;
    if (first >= T.size() || !(T.back() >= T[first] * 1e4))
        throw std::invalid_argument("detect_crossover: series must span >= 4 decades");

    // local slopes on decade-wide sliding windows
    struct Win { double t_lo, t_hi, slope; bool valid; };
    std::vector<Win> wins;
    for (double lo = T[first]; lo * 10.0 <= T.back() * (1 + 1e-9); lo *= 1.2) {
        const double hi = lo * 10.0;
        std::vector<double> lx, ly;
        bool ok = true;
        for (std::size_t k = first; k < T.size(); ++k) {
            if (T[k] < lo || T[k] > hi) continue;
            const double v = series.var_at(k, site - 1);
            if (!(v > 0.0)) { ok = false; break; }
            lx.push_back(std::log(T[k]));
            ly.push_back(std::log(v));
        }
        Win w{lo, hi, 0.0, false};
        if (ok && lx.size() >= 8) {
            w.slope = least_squares(lx, ly).slope;
            w.valid = true;
        }
        wins.push_back(w);
    }
    if (wins.empty()) return std::nullopt;

    // anomalous label: nearest even integer >= 2 within +-0.5 (flat stretches
    // are not transport)
    auto even_label = [](double s) -> int {
        const long k = std::lround(s / 2.0) * 2;
        return (k >= 2 && std::abs(s - static_cast<double>(k)) <= 0.5)
                   ? static_cast<int>(k)
                   : -1;
    };

    std::size_t best_len = 0, best_start = 0;
    std::size_t i = 0;
    while (i < wins.size()) {
        if (!wins[i].valid || even_label(wins[i].slope) < 0) { ++i; continue; }
        const int label = even_label(wins[i].slope);
        std::size_t j = i;
        while (j < wins.size() && wins[j].valid && even_label(wins[j].slope) == label) ++j;
        if (j - i > best_len) { best_len = j - i; best_start = i; }
        i = j;
    }
    if (best_len == 0) return std::nullopt;
    Crossover c;
    c.t_star = wins[best_start + best_len - 1].t_hi;

    // latest run of at least two windows with slope within 0.3 of 1, starting
    // after the anomalous phase
    std::size_t run_start = wins.size(), run_len = 0;
    i = 0;
    while (i < wins.size()) {
        if (!wins[i].valid || std::abs(wins[i].slope - 1.0) > 0.3) { ++i; continue; }
        std::size_t j = i;
        while (j < wins.size() && wins[j].valid && std::abs(wins[j].slope - 1.0) <= 0.3) ++j;
        if (j - i >= 2 && wins[i].t_lo >= c.t_star) { run_start = i; run_len = j - i; }
        i = j;
    }
    if (run_len > 0) c.t_star2 = wins[run_start].t_lo;
    return c;
}

std::vector<DiffusionFit> fit_diffusion_coefficients(const VarianceSeries& series,
                                                     double t_lo, double t_hi) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw std::invalid_argument("fit_diffusion_coefficients: bad window");
    std::vector<DiffusionFit> out;
    bool any_normal = false;
    for (int site = 1; site <= series.L; ++site) {
        std::vector<double> ts, vs, lx, ly;
        for (std::size_t it = 0; it < series.times.size(); ++it) {
            const double t = series.times[it];
            if (t < t_lo || t > t_hi) continue;
            const double v = series.var_at(it, site - 1);
            ts.push_back(t);
            vs.push_back(v);
            if (v > 0.0) {
                lx.push_back(std::log(t));
                ly.push_back(std::log(v));
            }
        }
        DiffusionFit f;
        f.site = site;
        if (ts.size() >= 4 && lx.size() == ts.size()) {
            f.slope_loglog = least_squares(lx, ly).slope;
            f.normal = f.slope_loglog >= 0.7 && f.slope_loglog <= 1.3;
            f.D = least_squares(ts, vs).slope;
        }
        any_normal = any_normal || f.normal;
        out.push_back(f);
    }
    if (!any_normal)
        throw WindowNotNormal("fit_diffusion_coefficients: no site shows slope in [0.7, 1.3]");
    return out;
}

}  // namespace bhchain
