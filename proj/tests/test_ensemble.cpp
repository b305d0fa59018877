#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bhchain/ensemble.hpp"
#include "bhchain/errors.hpp"
#include "bhchain/model.hpp"

using namespace bhchain;

namespace {

EnsembleSpec single_site_spec(int L, int site_1based) {
    EnsembleSpec spec;
    spec.base = ActionAngleState(L);
    for (int j = 0; j < L; ++j) spec.base.I[j] = 0.0;
    spec.base.I[site_1based - 1] = 1.0;
    return spec;
}

}  // namespace

TEST_CASE("degenerate distribution: identical copies of the base") {
    ChainParams p;
    p.L = 4;
    EnsembleSpec spec;
    spec.base = ActionAngleState(4);
    spec.base.I = {0.4, 0.3, 0.2, 0.1};
    spec.base.phi = {0.1, 0.2, 0.3, 0.4};
    spec.width = 0.0;
    spec.count = 5;
    spec.angle_init = AngleInit::FixedBase;
    const auto members = make_ensemble(spec, p);
    REQUIRE(members.size() == 5);
    for (const auto& m : members)
        for (int j = 0; j < 4; ++j) {
            CHECK(m.P[j] == members[0].P[j]);
            CHECK(m.Q[j] == members[0].Q[j]);
        }
}

TEST_CASE("sampler statistics: unbiased peak action") {
    ChainParams p;
    p.L = 10;
    EnsembleSpec spec = single_site_spec(10, 5);
    spec.width = 1e-3;
    spec.count = 10'000;
    spec.seed = 42;
    const auto members = make_ensemble(spec, p);
    double mean = 0.0;
    for (const auto& m : members) {
        // members keep their own constraint, within the noise scale
        CHECK(std::abs(constraint_value(m) - 1.0) <= 6.0 * spec.width);
        mean += 0.5 * (m.P[4] * m.P[4] + m.Q[4] * m.Q[4]);
    }
    mean /= spec.count;
    CHECK(std::abs(mean - 1.0) <= 3e-5);
}

TEST_CASE("renormalized draws sit exactly on the constraint sphere") {
    ChainParams p;
    p.L = 6;
    p.norm = 2.0;
    EnsembleSpec spec;
    spec.base = ActionAngleState(6);
    spec.base.I = {1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    spec.width = 1e-3;
    spec.count = 200;
    spec.seed = 9;
    spec.renormalize = true;
    for (const auto& m : make_ensemble(spec, p))
        CHECK(std::abs(constraint_value(m) - 2.0) <= 1e-12);
}

TEST_CASE("width scale shows up in the drawn actions") {
    ChainParams p;
    p.L = 4;
    EnsembleSpec spec;
    spec.base = ActionAngleState(4);
    spec.base.I = {0.4, 0.3, 0.2, 0.1};
    spec.width = 1e-3;
    spec.count = 2000;
    spec.seed = 7;
    const auto members = make_ensemble(spec, p);
    // per-site standard deviation of the actions is of order width
    for (int j = 0; j < 4; ++j) {
        double m1 = 0.0, m2 = 0.0;
        for (const auto& m : members) {
            const double I = 0.5 * (m.P[j] * m.P[j] + m.Q[j] * m.Q[j]);
            m1 += I;
            m2 += I * I;
        }
        m1 /= members.size();
        m2 = m2 / members.size() - m1 * m1;
        const double sd = std::sqrt(std::max(m2, 0.0));
        CHECK(sd >= 0.2 * spec.width);
        CHECK(sd <= 3.0 * spec.width);
    }
}

TEST_CASE("same seed gives the same ensemble, member by member") {
    ChainParams p;
    p.L = 5;
    EnsembleSpec spec = single_site_spec(5, 3);
    spec.count = 16;
    spec.seed = 99;
    const auto a = make_ensemble(spec, p);
    const auto b = make_ensemble(spec, p);
    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 5; ++j) {
            CHECK(a[k].P[j] == b[k].P[j]);
            CHECK(a[k].Q[j] == b[k].Q[j]);
        }
}

TEST_CASE("infeasible bases are rejected") {
    ChainParams p;
    p.L = 3;
    EnsembleSpec spec;
    spec.base = ActionAngleState(3);
    spec.base.I = {0.2, 0.2, 0.2};  // sums to 0.6, not norm
    CHECK_THROWS_AS(make_ensemble(spec, p), InfeasibleBase);
}

TEST_CASE("J=0 freezes the per-site variance") {
    ChainParams p;
    p.L = 4;
    p.J = 0.0;
    p.U = 6.0;
    p.mu = 0.3;
    EnsembleSpec spec;
    spec.base = ActionAngleState(4);
    spec.base.I = {0.4, 0.3, 0.2, 0.1};
    spec.width = 1e-3;
    spec.count = 20;
    spec.seed = 5;
    const auto members = make_ensemble(spec, p);
    IntegratorConfig cfg;
    cfg.t_end = 100.0;
    cfg.sample_times = log_schedule(1.0, 100.0, 4);
    const VarianceSeries vs = evolve_ensemble(members, p, cfg, 2);
    for (int j = 0; j < 4; ++j) {
        const double v0 = vs.var_at(0, j);
        for (std::size_t it = 0; it < vs.times.size(); ++it)
            CHECK(vs.var_at(it, j) == doctest::Approx(v0).epsilon(1e-9).scale(1e-12));
    }
}

TEST_CASE("estimator correctness against a direct two-pass computation") {
    // hand-built trajectories: member k has I(t) = k for every site, constant
    ChainParams p;
    p.L = 2;
    p.J = 0.0;
    p.U = 0.0;
    p.mu = 0.0;
    p.norm = 3.0;
    // three members with site-1 actions {1, 2, 3} -> population variance 2/3
    std::vector<PQState> members;
    for (double a : {1.0, 2.0, 3.0}) {
        ActionAngleState aa(2);
        aa.I = {a, 3.0 - a};
        members.push_back(action_angle_to_pq(aa));
    }
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.sample_times = {1.0};
    const VarianceSeries vs = evolve_ensemble(members, p, cfg, 1);
    CHECK(vs.mean_at(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(vs.var_at(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(vs.mean_at(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(vs.var_at(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("worker count does not change the statistics bits") {
    ChainParams p;
    p.L = 5;
    p.J = 1.0;
    p.U = 10.0;
    p.mu = 0.1;
    EnsembleSpec spec = single_site_spec(5, 3);
    spec.count = 12;
    spec.seed = 11;
    const auto members = make_ensemble(spec, p);
    IntegratorConfig cfg;
    cfg.t_end = 30.0;
    cfg.sample_times = log_schedule(0.5, 30.0, 6);
    const VarianceSeries a = evolve_ensemble(members, p, cfg, 1);
    const VarianceSeries b = evolve_ensemble(members, p, cfg, 4);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.var.size(); ++i) {
        CHECK(a.var[i] == b.var[i]);
        CHECK(a.mean[i] == b.mean[i]);
    }
}

TEST_CASE("per-member constraint holds at every sample") {
    ChainParams p;
    p.L = 5;
    p.J = 1.0;
    p.U = 5.0;
    p.mu = 0.0;
    p.norm = 2.0;
    EnsembleSpec spec = single_site_spec(5, 2);
    spec.base.I[1] = 2.0;  // base must sum to norm
    spec.count = 4;
    spec.seed = 3;
    const auto members = make_ensemble(spec, p);
    IntegratorConfig cfg;
    cfg.t_end = 50.0;
    cfg.sample_times = log_schedule(0.5, 50.0, 8);
    for (const auto& m : members) {
        const IntegrationOutcome o = integrate_orbit(m, p, cfg);
        REQUIRE(o.completed());
        for (double c : o.trajectory.constraint)
            CHECK(std::abs(c - p.norm) / p.norm <= 0.01);
    }
}

TEST_CASE("ensemble spec validation") {
    EnsembleSpec s;
    s.count = 1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.count = 2;
    s.width = 0.5;  // wider than the documented bound
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
