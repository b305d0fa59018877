#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bhchain/chaos.hpp"
#include "bhchain/model.hpp"
#include "bhchain/rng.hpp"

using namespace bhchain;

namespace {

PQState filled_site_state(int L, int site_1based, double norm = 1.0,
                          double floor = 1e-12) {
    ActionAngleState aa(L);
    for (int j = 0; j < L; ++j) aa.I[j] = floor;
    aa.I[site_1based - 1] = 1.0;
    double s = 0.0;
    for (double v : aa.I) s += v;
    for (auto& v : aa.I) v *= norm / s;
    return action_angle_to_pq(aa);
}

PQState two_filled_state(int L, int a, int b) {
    ActionAngleState aa(L);
    for (int j = 0; j < L; ++j) aa.I[j] = 1e-12;
    aa.I[a - 1] = 0.5;
    aa.I[b - 1] = 0.5;
    double s = 0.0;
    for (double v : aa.I) s += v;
    for (auto& v : aa.I) v /= s;
    // angles staggered a little so the resonant pair is generic
    for (int j = 0; j < L; ++j) aa.phi[j] = 0.61 * j;
    return action_angle_to_pq(aa);
}

}  // namespace

TEST_CASE("config validation enforces the documented ranges") {
    LyapunovConfig c;
    c.delta0 = 1e-3;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.delta0 = 1e-9;
    c.t_total = 5.0;
    c.t_transient = 10.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("U=0 chains have zero Lyapunov exponents") {
    ChainParams p;
    p.L = 6;
    p.J = 1.0;
    p.U = 0.0;
    p.mu = 0.2;
    LyapunovConfig cfg;
    cfg.t_total = 4000.0;
    cfg.t_transient = 10.0;
    const LyapunovResult r = lyapunov_per_site(filled_site_state(6, 3), p, cfg);
    REQUIRE(r.status == IntegrationStatus::Completed);
    CHECK(std::abs(r.lambda_max) <= 1e-3);
    for (double l : r.lambda_per_site) CHECK(std::abs(l) <= 1e-3);
}

TEST_CASE("J=0 spectrum is flat at zero") {
    ChainParams p;
    p.L = 4;
    p.J = 0.0;
    p.U = 2.0;
    p.mu = 0.1;
    LyapunovConfig cfg;
    cfg.t_total = 20000.0;
    cfg.renorm_interval = 2.0;
    ActionAngleState aa(4);
    aa.I = {0.4, 0.3, 0.2, 0.1};
    const LyapunovResult r = lyapunov_spectrum(action_angle_to_pq(aa), p, cfg);
    REQUIRE(r.status == IntegrationStatus::Completed);
    for (double l : r.spectrum) CHECK(std::abs(l) <= 1.5e-3);
}

TEST_CASE("chaotic orbit: spectrum pairing, zero sum, hyperchaos") {
    ChainParams p;
    p.L = 6;
    p.J = 1.0;
    p.U = 5.0;
    p.mu = 0.2;
    LyapunovConfig cfg;
    cfg.t_total = 3000.0;
    const PQState x0 = two_filled_state(6, 3, 4);
    const LyapunovResult r = lyapunov_spectrum(x0, p, cfg);
    REQUIRE(r.status == IntegrationStatus::Completed);
    const int M = static_cast<int>(r.spectrum.size());
    REQUIRE(M == 12);

    double sum = 0.0;
    for (double l : r.spectrum) sum += l;
    CHECK(std::abs(sum) <= 1e-2 * M);

    for (int k = 0; k < M / 2; ++k)
        CHECK(std::abs(r.spectrum[k] + r.spectrum[M - 1 - k]) <= 2e-2);

    // hyperchaos: several positive exponents
    int n_pos = 0;
    for (double l : r.spectrum)
        if (l > 0.01) ++n_pos;
    CHECK(n_pos >= p.L / 2);

    CHECK(r.lambda_max > 0.05);
}

TEST_CASE("max exponent agrees between single-vector and spectrum modes") {
    ChainParams p;
    p.L = 6;
    p.J = 1.0;
    p.U = 5.0;
    p.mu = 0.2;
    const PQState x0 = two_filled_state(6, 3, 4);
    LyapunovConfig cfg;
    cfg.t_total = 3000.0;
    cfg.mode = LyapunovMode::MaxOnly;
    const LyapunovResult a = lyapunov_per_site(x0, p, cfg);
    cfg.mode = LyapunovMode::Spectrum;
    const LyapunovResult b = lyapunov_spectrum(x0, p, cfg);
    REQUIRE(a.status == IntegrationStatus::Completed);
    REQUIRE(b.status == IntegrationStatus::Completed);
    CHECK(std::abs(a.lambda_max - b.lambda_max) <= 0.05 * std::abs(b.lambda_max));
}

TEST_CASE("delta0 robustness: exponents insensitive to the variation scale") {
    // the tangent evolves by the exact variational equations, so the
    // delta0-independence the paper checked numerically holds identically
    ChainParams p;
    p.L = 5;
    p.J = 1.0;
    p.U = 8.0;
    p.mu = 0.1;
    const PQState x0 = two_filled_state(5, 2, 3);
    LyapunovConfig cfg;
    cfg.t_total = 500.0;
    cfg.delta0 = 1e-6;
    const LyapunovResult a = lyapunov_per_site(x0, p, cfg);
    cfg.delta0 = 1e-12;
    const LyapunovResult b = lyapunov_per_site(x0, p, cfg);
    REQUIRE(a.status == IntegrationStatus::Completed);
    CHECK(std::abs(a.lambda_max - b.lambda_max) <= 0.05 * std::abs(a.lambda_max));
    for (int n = 0; n < 5; ++n)
        CHECK(a.lambda_per_site[n] == b.lambda_per_site[n]);
}

TEST_CASE("per-site exponents converge to the leading exponent at long times") {
    ChainParams p;
    p.L = 6;
    p.J = 1.0;
    p.U = 5.0;
    p.mu = 0.2;
    const PQState x0 = two_filled_state(6, 3, 4);
    LyapunovConfig cfg;
    cfg.t_total = 2000.0;
    const LyapunovResult r = lyapunov_per_site(x0, p, cfg);
    REQUIRE(r.status == IntegrationStatus::Completed);
    const double lmax_sites =
        *std::max_element(r.lambda_per_site.begin(), r.lambda_per_site.end());
    CHECK(r.lambda_max == lmax_sites);

    cfg.mode = LyapunovMode::MaxOnly;
    const LyapunovResult m = lyapunov_per_site(x0, p, cfg);
    CHECK(std::abs(r.lambda_max - m.lambda_max) <= 0.1 * std::abs(m.lambda_max) + 0.01);
}

TEST_CASE("mixed phase space: initial conditions change lambda_max by 5x") {
    ChainParams p;
    p.L = 6;
    p.J = 1.0;
    p.U = 8.0;
    p.mu = 0.2;
    LyapunovConfig cfg;
    cfg.t_total = 2000.0;

    const LyapunovResult chaotic = lyapunov_per_site(two_filled_state(6, 3, 4), p, cfg);

    // homogeneous fillings with aligned angles form a regular configuration
    ActionAngleState aa(6);
    for (int j = 0; j < 6; ++j) aa.I[j] = 1.0 / 6;
    const LyapunovResult regular = lyapunov_per_site(action_angle_to_pq(aa), p, cfg);

    REQUIRE(chaotic.status == IntegrationStatus::Completed);
    REQUIRE(regular.status == IntegrationStatus::Completed);
    CHECK(chaotic.lambda_max >= 5.0 * std::max(regular.lambda_max, 1e-4));
}

TEST_CASE("convergence series is recorded and flags are sane") {
    ChainParams p;
    p.L = 5;
    p.J = 1.0;
    p.U = 5.0;
    p.mu = 0.2;
    const PQState x0 = two_filled_state(5, 2, 3);
    LyapunovConfig cfg;
    cfg.t_total = 2000.0;
    const LyapunovResult r = lyapunov_per_site(x0, p, cfg);
    REQUIRE(r.status == IntegrationStatus::Completed);
    CHECK(r.convergence.size() >= 8);
    CHECK(r.convergence.front().first < r.convergence.back().first);
}
