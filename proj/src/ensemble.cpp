#include "bhchain/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bhchain/errors.hpp"
#include "bhchain/parallel.hpp"
#include "bhchain/rng.hpp"

namespace bhchain {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void EnsembleSpec::validate() const {
    if (count < 2) throw std::invalid_argument("EnsembleSpec: count must be >= 2");
    if (!(width >= 0.0) || width > 1e-1)
        throw std::invalid_argument("EnsembleSpec: width must be in [0, 0.1]");
    if (!(action_floor > 0.0))
        throw std::invalid_argument("EnsembleSpec: action_floor must be > 0");
}

std::vector<PQState> make_ensemble(const EnsembleSpec& spec, const ChainParams& params) {
    spec.validate();
    params.validate();
    const int L = params.L;
    if (spec.base.size() != L)
        throw std::invalid_argument("make_ensemble: base/params dimension mismatch");

    double base_sum = 0.0;
    for (double v : spec.base.I) {
        if (v < 0.0) throw InfeasibleBase("make_ensemble: negative base action");
        base_sum += v;
    }
    if (!(base_sum > 0.0) ||
        std::abs(base_sum - params.norm) / params.norm > 1e-6)
        throw InfeasibleBase("make_ensemble: base actions must sum to norm");

    std::vector<PQState> out;
    out.reserve(spec.count);
    std::vector<double> I(L), phi(L);

    for (int k = 0; k < spec.count; ++k) {
        SplitMix64 rng = seed_stream(spec.seed, static_cast<std::uint64_t>(k));
        auto draw = [&]() {
            return spec.dist == EnsembleDist::Gaussian ? rng.gaussian()
                                                       : rng.uniform(-1.0, 1.0);
        };
        // occupied sites get additive noise of scale width, clipped at the
        // floor; empty sites start at the floor for every member
        for (int j = 0; j < L; ++j) {
            const double base = std::max(spec.base.I[j], spec.action_floor);
            double v = base;
            const bool occupied = spec.base.I[j] > spec.action_floor;
            if (occupied && spec.width > 0.0) v += spec.width * draw();
            I[j] = std::max(v, spec.action_floor);
        }
        // angles
        for (int j = 0; j < L; ++j) {
            if (spec.angle_init == AngleInit::UniformRandom) {
                phi[j] = rng.uniform(0.0, kTwoPi);
            } else {
                double a = spec.base.phi[j];
                if (spec.base.I[j] > spec.action_floor && spec.width > 0.0)
                    a += spec.width * draw();
                phi[j] = a;
            }
        }
        double s = 0.0;
        for (int j = 0; j < L; ++j) s += I[j];
        if (!(s > 0.0)) throw InfeasibleBase("make_ensemble: clipped sample has no mass");
        const double scale = spec.renormalize ? params.norm / s : 1.0;
        ActionAngleState aa(L);
        for (int j = 0; j < L; ++j) {
            aa.I[j] = I[j] * scale;
            aa.phi[j] = phi[j];
        }
        out.push_back(action_angle_to_pq(aa));
    }
    return out;
}

VarianceSeries evolve_ensemble(const std::vector<PQState>& members,
                               const ChainParams& params, const IntegratorConfig& cfg,
                               int workers) {
    params.validate();
    cfg.validate();
    const int count = static_cast<int>(members.size());
    if (count < 2) throw std::invalid_argument("evolve_ensemble: need >= 2 members");
    const int L = params.L;

    std::vector<double> samples = cfg.sample_times;
    if (samples.empty()) samples = {0.0, cfg.t_end};
    if (samples.front() > 0.0) samples.insert(samples.begin(), 0.0);
    const std::size_t nt = samples.size();

    IntegratorConfig mcfg = cfg;
    mcfg.sample_times = samples;

    // per-member action tables, filled independently and reduced in fixed
    // index order afterwards
    std::vector<std::vector<double>> actions(count);  // nt x L, truncated on breach
    std::vector<double> breach_time(count, std::numeric_limits<double>::infinity());

    parallel_for_static(count, resolve_workers(workers), [&](int k) {
        IntegrationOutcome o = integrate_orbit(members[k], params, mcfg);
        auto& tab = actions[k];
        tab.assign(o.trajectory.size() * L, 0.0);
        for (std::size_t it = 0; it < o.trajectory.size(); ++it) {
            const PQState& s = o.trajectory.states[it];
            for (int j = 0; j < L; ++j)
                tab[it * L + j] = 0.5 * (s.P[j] * s.P[j] + s.Q[j] * s.Q[j]);
        }
        if (!o.completed()) breach_time[k] = o.fail_time;
    });

    // conservative truncation at the earliest member breach
    double valid_until = samples.back();
    std::size_t nt_valid = nt;
    for (int k = 0; k < count; ++k) {
        nt_valid = std::min(nt_valid, actions[k].size() / L);
        valid_until = std::min(valid_until, breach_time[k]);
    }

    VarianceSeries vs;
    vs.L = L;
    vs.count = count;
    vs.valid_until = std::min(valid_until, nt_valid > 0 ? samples[nt_valid - 1]
                                                        : 0.0);
    vs.times.assign(samples.begin(), samples.begin() + nt_valid);
    vs.mean.assign(nt_valid * L, 0.0);
    vs.var.assign(nt_valid * L, 0.0);

    // two-pass population statistics (1/count normalization), fixed order
    for (std::size_t it = 0; it < nt_valid; ++it) {
        for (int j = 0; j < L; ++j) {
            double m = 0.0;
            for (int k = 0; k < count; ++k) m += actions[k][it * L + j];
            m /= count;
            double v = 0.0;
            for (int k = 0; k < count; ++k) {
                const double d = actions[k][it * L + j] - m;
                v += d * d;
            }
            vs.mean[it * L + j] = m;
            vs.var[it * L + j] = v / count;
        }
    }
    return vs;
}

}  // namespace bhchain
