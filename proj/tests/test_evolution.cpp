#include <complex>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "aqc/errors.hpp"
#include "aqc/evolution.hpp"
#include "aqc/rng.hpp"
#include "support/test_support.hpp"

using namespace aqc;

TEST_CASE("initial_state is the uniform superposition") {
    const StateVector one = initial_state(1);
    CHECK(one.size() == 2);
    CHECK(std::abs(one[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(one[1] - 1.0 / std::sqrt(2.0)) < 1e-15);

    const StateVector two = initial_state(2);
    for (Eigen::Index z = 0; z < 4; ++z) CHECK(two[z] == std::complex<double>(0.5, 0.0));

    CHECK(std::abs(initial_state(9).norm() - 1.0) < 1e-14);
    CHECK_THROWS_AS(initial_state(0), CapacityError);
    CHECK_THROWS_AS(initial_state(25), CapacityError);
}

TEST_CASE("evolve at T = 0 returns the start state unchanged") {
    Rng rng(0x90);
    const HamiltonianData hd = build_hamiltonian(generate_fixed_clauses(4, 4, rng));
    EvolutionConfig cfg;
    cfg.total_time = 0.0;
    CHECK(evolve(hd, cfg) == initial_state(4));
}

TEST_CASE("evolve matches the dense time-ordered propagator") {
    Rng rng(0xa1);
    for (int trial = 0; trial < 3; ++trial) {
        const int n = 3 + trial;
        const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * n)));
        const HamiltonianData hd = build_hamiltonian(generate_fixed_clauses(n, m, rng));
        for (const double t : {1.0, 10.0}) {
            EvolutionConfig cfg;
            cfg.total_time = t;
            cfg.step_halvings = calibrate_step_halvings(hd, cfg);
            EvolveStats stats;
            const StateVector psi = evolve(hd, cfg, &stats);
            CHECK(stats.norm_drift <= cfg.norm_tolerance);
            const StateVector oracle = testing::dense_propagate(hd, t, initial_state(n));
            CHECK((psi - oracle).norm() < cfg.oracle_tolerance);
        }
    }
}

TEST_CASE("gross steps trip the norm-drift diagnostic") {
    Rng rng(0xb1);
    const HamiltonianData hd = build_hamiltonian(generate_fixed_clauses(5, 8, rng));
    EvolutionConfig cfg;
    cfg.total_time = 50.0;
    cfg.dt = 0.4;  // far outside the stability region
    CHECK_THROWS_AS(evolve(hd, cfg), IntegrationAccuracyError);
    try {
        evolve(hd, cfg);
    } catch (const IntegrationAccuracyError& e) {
        CHECK(e.norm_drift > cfg.norm_tolerance);
        CHECK(e.steps == 125);
    }
}

TEST_CASE("evolution preserves inner products between orthogonal states") {
    Rng rng(0xc1);
    const HamiltonianData hd = build_hamiltonian(generate_fixed_clauses(5, 6, rng));
    EvolutionConfig cfg;
    cfg.total_time = 10.0;
    // Random test states carry weight at the top of the spectrum, unlike the
    // adiabatic start state, so refine the step beyond the default.
    cfg.step_halvings = 2;

    StateVector a = testing::random_state(hd.dim(), rng);
    StateVector b = testing::random_state(hd.dim(), rng);
    b -= a.dot(b) * a;  // orthogonalize
    b.normalize();

    const StateVector ua = evolve_state(hd, cfg, a);
    const StateVector ub = evolve_state(hd, cfg, b);
    CHECK(std::abs(ua.dot(ub)) < 10.0 * cfg.oracle_tolerance);
    CHECK(std::abs(ua.dot(ua).real() - 1.0) < 10.0 * cfg.oracle_tolerance);
}

TEST_CASE("evolution is bitwise deterministic") {
    Rng rng(0xd1);
    const HamiltonianData hd = build_hamiltonian(generate_fixed_clauses(6, 6, rng));
    EvolutionConfig cfg;
    cfg.total_time = 7.5;
    const StateVector a = evolve(hd, cfg);
    const StateVector b = evolve(hd, cfg);
    CHECK(a == b);
}

TEST_CASE("long runs approach the adiabatic limit on a GUSA instance") {
    Rng rng(6);
    const ExactCoverInstance inst = generate_gusa(6, rng);
    const HamiltonianData hd = build_hamiltonian(inst);
    const auto targets = enumerate_satisfying(inst);
    REQUIRE(targets.size() == 1);

    double best = 0.0;
    for (double t = 16.0; t <= 4096.0; t *= 4.0) {
        EvolutionConfig cfg;
        cfg.total_time = t;
        best = std::max(best, success_probability(evolve(hd, cfg), targets));
        if (best > 0.9) break;
    }
    CHECK(best > 0.9);
}

TEST_CASE("success_probability") {
    const std::vector<Assignment> one{3};
    StateVector basis = StateVector::Zero(8);
    basis[3] = std::complex<double>(0.0, 1.0);  // phase must not matter
    CHECK(success_probability(basis, one) == doctest::Approx(1.0).epsilon(1e-15));

    const StateVector uniform = initial_state(3);
    CHECK(success_probability(uniform, one) == doctest::Approx(0.125).epsilon(1e-14));

    const std::vector<Assignment> three{1, 2, 4};
    CHECK(success_probability(uniform, three) == doctest::Approx(3.0 / 8.0).epsilon(1e-14));

    CHECK_THROWS_AS(success_probability(uniform, std::vector<Assignment>{}),
                    InvalidParameterError);
    CHECK_THROWS_AS(success_probability(uniform, std::vector<Assignment>{8}),
                    InvalidParameterError);
}

TEST_CASE("success_probability ignores a global phase") {
    Rng rng(0xe1);
    const StateVector psi = testing::random_state(16, rng);
    const std::vector<Assignment> targets{0, 5, 9};
    const double p = success_probability(psi, targets);
    for (int trial = 0; trial < 10; ++trial) {
        const double theta = 2.0 * M_PI * rng.uniform01();
        const StateVector rotated = std::polar(1.0, theta) * psi;
        CHECK(success_probability(rotated, targets) == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("amplified_success") {
    CHECK(amplified_success(0.04, 200) > 0.9997);
    CHECK(amplified_success(1.0, 17) == 1.0);
    CHECK(amplified_success(0.125, 1) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(amplified_success(0.0, 5) == 0.0);
    CHECK_THROWS_AS(amplified_success(-0.1, 1), InvalidParameterError);
    CHECK_THROWS_AS(amplified_success(0.5, 0), InvalidParameterError);
}

TEST_CASE("state dump round trip") {
    Rng rng(0xf1);
    const StateVector psi = testing::random_state(32, rng);
    std::stringstream buf;
    write_state_json(buf, psi);
    const StateVector back = read_state_json(buf);
    REQUIRE(back.size() == psi.size());
    CHECK((back - psi).norm() == 0.0);

    const StateVector big = StateVector::Zero(1 << 11);
    std::stringstream sink;
    CHECK_THROWS_AS(write_state_json(sink, big), CapacityError);
}
