#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bhchain/errors.hpp"
#include "bhchain/model.hpp"
#include "bhchain/rng.hpp"

using namespace bhchain;

namespace {

constexpr double kPi = 3.14159265358979323846;

ActionAngleState random_aa(int L, std::uint64_t seed, double imin = 0.02) {
    ActionAngleState s(L);
    SplitMix64 rng(seed);
    double sum = 0.0;
    for (int j = 0; j < L; ++j) {
        s.I[j] = imin + rng.uniform();
        sum += s.I[j];
        s.phi[j] = rng.uniform(0.0, 2.0 * kPi);
    }
    for (int j = 0; j < L; ++j) s.I[j] /= sum;  // norm 1
    return s;
}

}  // namespace

TEST_CASE("hamiltonian_pq: decoupled single-site value") {
    ChainParams p;
    p.L = 3;
    p.J = 0.0;
    p.U = 2.0;
    p.mu = 0.0;
    PQState s(3);
    s.P[0] = std::sqrt(2.0);  // I_1 = 1
    CHECK(hamiltonian_pq(s, p) == doctest::Approx(1.0).epsilon(1e-14));

    PQState zero(3);
    CHECK(hamiltonian_pq(zero, p) == 0.0);
}

TEST_CASE("hamiltonian in both coordinate systems agrees") {
    ChainParams p;
    p.L = 5;
    p.J = 1.0;
    p.U = 9.0;
    p.mu = 0.4;
    for (int rep = 0; rep < 5; ++rep) {
        const ActionAngleState aa = random_aa(5, 11 + rep);
        const PQState pq = action_angle_to_pq(aa);
        const double h1 = hamiltonian_pq(pq, p);
        const double h2 = hamiltonian_action_angle(aa, p);
        CHECK(h1 == doctest::Approx(h2).epsilon(1e-12));
    }
    // periodic boundary as well
    p.boundary = Boundary::Periodic;
    const ActionAngleState aa = random_aa(5, 77);
    CHECK(hamiltonian_pq(action_angle_to_pq(aa), p) ==
          doctest::Approx(hamiltonian_action_angle(aa, p)).epsilon(1e-12));
}

TEST_CASE("hamiltonian_action_angle: decoupled forms") {
    ChainParams p;
    p.L = 4;
    p.J = 0.0;
    p.U = 3.0;
    p.mu = 0.7;
    ActionAngleState s = random_aa(4, 5);
    double expect = 0.0;
    for (int j = 0; j < 4; ++j)
        expect += 0.5 * p.U * s.I[j] * s.I[j] - p.mu * s.I[j];
    CHECK(hamiltonian_action_angle(s, p) == doctest::Approx(expect).epsilon(1e-14));

    // a single filled site kills H1 through the sqrt(I_j I_{j+1}) factors
    p.J = 2.5;
    ActionAngleState one(4);
    one.I[0] = 1.0;
    one.phi[1] = 1.234;
    CHECK(hamiltonian_action_angle(one, p) ==
          doctest::Approx(0.5 * p.U - p.mu).epsilon(1e-14));
}

TEST_CASE("eom_pq: decoupled single-site derivative") {
    ChainParams p;
    p.L = 2;
    p.J = 0.0;
    p.U = 2.0;
    p.mu = 0.0;
    PQState s(2);
    s.P[0] = std::sqrt(2.0);
    const PQState d = eom_pq(s, p);
    CHECK(d.P[0] == doctest::Approx(0.0));
    CHECK(d.Q[0] == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(d.P[1] == 0.0);
    CHECK(d.Q[1] == 0.0);
}

TEST_CASE("eom_action_angle: decoupled limit and symmetry") {
    ChainParams p;
    p.L = 4;
    p.J = 0.0;
    p.U = 5.0;
    p.mu = 0.8;
    ActionAngleState s = random_aa(4, 21);
    ActionAngleState d = eom_action_angle(s, p);
    for (int j = 0; j < 4; ++j) {
        CHECK(d.I[j] == 0.0);
        CHECK(d.phi[j] == doctest::Approx(-p.mu + p.U * s.I[j]).epsilon(1e-14));
    }

    // equal neighbor fillings with equal angles: all sines vanish
    p.J = 1.7;
    ActionAngleState eq(4);
    for (int j = 0; j < 4; ++j) {
        eq.I[j] = 0.25;
        eq.phi[j] = 0.9;
    }
    d = eom_action_angle(eq, p);
    for (int j = 0; j < 4; ++j) CHECK(d.I[j] == doctest::Approx(0.0).scale(1));
}

TEST_CASE("eom_action_angle matches the chain-rule push-forward of eom_pq") {
    ChainParams p;
    p.L = 6;
    p.J = 1.1;
    p.U = 6.0;
    p.mu = 0.3;
    const ActionAngleState aa = random_aa(6, 33);
    const PQState pq = action_angle_to_pq(aa);
    const PQState dpq = eom_pq(pq, p);
    const ActionAngleState daa = eom_action_angle(aa, p);
    for (int j = 0; j < 6; ++j) {
        const double idot = pq.P[j] * dpq.P[j] + pq.Q[j] * dpq.Q[j];
        const double phidot =
            (pq.Q[j] * dpq.P[j] - pq.P[j] * dpq.Q[j]) / (2.0 * aa.I[j]);
        CHECK(daa.I[j] == doctest::Approx(idot).epsilon(1e-8));
        CHECK(daa.phi[j] == doctest::Approx(phidot).epsilon(1e-8));
    }
}

TEST_CASE("eom_action_angle signals the angle singularity") {
    ChainParams p;
    p.L = 3;
    ActionAngleState s(3);
    s.I = {0.5, 0.5, 0.0};
    CHECK_THROWS_AS(eom_action_angle(s, p), AngleSingularity);
}

TEST_CASE("total action is conserved by the action equations of motion") {
    for (Boundary b : {Boundary::HardWall, Boundary::Periodic}) {
        ChainParams p;
        p.L = 8;
        p.J = 1.4;
        p.U = 3.0;
        p.mu = 0.2;
        p.boundary = b;
        const ActionAngleState s = random_aa(8, 55);
        const ActionAngleState d = eom_action_angle(s, p);
        double sum = 0.0;
        for (double v : d.I) sum += v;
        CHECK(std::abs(sum) <= 1e-12);
    }
}

TEST_CASE("coordinate transforms: pinned values and round trip") {
    PQState s(2);
    s.P[0] = std::sqrt(2.0);
    ActionAngleState aa = pq_to_action_angle(s);
    CHECK(aa.I[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(aa.phi[0] == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(aa.I[1] == 0.0);
    CHECK(aa.phi[1] == 0.0);  // convention at the origin

    for (int rep = 0; rep < 10; ++rep) {
        const ActionAngleState x = random_aa(5, 100 + rep);
        const ActionAngleState y = pq_to_action_angle(action_angle_to_pq(x));
        for (int j = 0; j < 5; ++j) {
            CHECK(y.I[j] == doctest::Approx(x.I[j]).epsilon(1e-14));
            CHECK(y.phi[j] == doctest::Approx(x.phi[j]).epsilon(1e-13).scale(1));
        }
    }
}

TEST_CASE("dimension mismatches are rejected") {
    ChainParams p;
    p.L = 4;
    PQState s(3);
    CHECK_THROWS_AS(hamiltonian_pq(s, p), std::invalid_argument);
    CHECK_THROWS_AS(eom_pq(s, p), std::invalid_argument);
}

TEST_CASE("chain params validation") {
    ChainParams p;
    p.L = 1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.L = 2;
    p.norm = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.norm = 1.0;
    p.J = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
