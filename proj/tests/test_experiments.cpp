#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "aqc/errors.hpp"
#include "aqc/experiments.hpp"
#include "aqc/report.hpp"
#include "aqc/rng.hpp"

using namespace aqc;

TEST_CASE("median_with_ci basics") {
    const MedianCi three = median_with_ci({3.0, 1.0, 2.0});
    CHECK(three.median == 2.0);
    CHECK(three.lower == 1.0);
    CHECK(three.upper == 3.0);

    const MedianCi even = median_with_ci({4.0, 1.0, 3.0, 2.0});
    CHECK(even.median == 2.5);

    const MedianCi constant = median_with_ci(std::vector<double>(20, 7.0));
    CHECK(constant.median == 7.0);
    CHECK(constant.lower == 7.0);
    CHECK(constant.upper == 7.0);

    CHECK_THROWS_AS(median_with_ci({1.0}), InvalidParameterError);
    CHECK_THROWS_AS(median_with_ci({1.0, 2.0}, 1.5), InvalidParameterError);
}

TEST_CASE("median CI endpoints are order statistics bracketing the median") {
    Rng rng(0x1001);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + rng.below(60);
        std::vector<double> samples(m);
        for (double& s : samples) s = rng.uniform01();
        const MedianCi ci = median_with_ci(samples);
        std::sort(samples.begin(), samples.end());
        CHECK(std::find(samples.begin(), samples.end(), ci.lower) != samples.end());
        CHECK(std::find(samples.begin(), samples.end(), ci.upper) != samples.end());
        CHECK(ci.lower <= ci.median);
        CHECK(ci.median <= ci.upper);
    }
}

TEST_CASE("median CI covers the true median about 95% of the time at m=75") {
    Rng rng(0x2002);
    const int trials = 10000;
    int covered = 0;
    std::vector<double> samples(75);
    for (int t = 0; t < trials; ++t) {
        for (double& s : samples) s = rng.uniform01();
        const MedianCi ci = median_with_ci(samples);
        if (ci.lower <= 0.5 && 0.5 <= ci.upper) ++covered;
    }
    const double coverage = static_cast<double>(covered) / trials;
    CHECK(coverage >= 0.935);
    CHECK(coverage <= 0.965);
}

TEST_CASE("quadratic fit") {
    SUBCASE("recovers exact coefficients") {
        std::vector<std::pair<double, double>> pts;
        for (int x = 1; x <= 6; ++x) {
            pts.emplace_back(x, 1.0 + 2.0 * x + 3.0 * x * x);
        }
        const QuadraticFit fit = fit_quadratic(pts);
        CHECK(std::abs(fit.coefficients[0] - 1.0) < 1e-9);
        CHECK(std::abs(fit.coefficients[1] - 2.0) < 1e-9);
        CHECK(std::abs(fit.coefficients[2] - 3.0) < 1e-9);
        CHECK(fit(10.0) == doctest::Approx(321.0).epsilon(1e-9));
    }

    SUBCASE("three points interpolate exactly") {
        const QuadraticFit fit = fit_quadratic({{1.0, 2.0}, {2.0, 1.0}, {4.0, 5.0}});
        CHECK(fit.residuals.norm() < 1e-10);
    }

    SUBCASE("residuals are orthogonal to the design") {
        Rng rng(0x3003);
        std::vector<std::pair<double, double>> pts;
        for (int x = 2; x <= 12; ++x) {
            pts.emplace_back(x, 0.5 + 0.3 * x + 0.2 * x * x + (rng.uniform01() - 0.5));
        }
        const QuadraticFit fit = fit_quadratic(pts);
        double dot0 = 0.0;
        double dot1 = 0.0;
        double dot2 = 0.0;
        for (std::size_t r = 0; r < pts.size(); ++r) {
            const double x = pts[r].first;
            const double res = fit.residuals[static_cast<Eigen::Index>(r)];
            dot0 += res;
            dot1 += res * x;
            dot2 += res * x * x;
        }
        CHECK(std::abs(dot0) < 1e-8);
        CHECK(std::abs(dot1) < 1e-8);
        CHECK(std::abs(dot2) < 1e-8);
    }

    SUBCASE("underdetermined input is rejected") {
        CHECK_THROWS_AS(fit_quadratic({{1.0, 1.0}, {2.0, 2.0}}), InvalidParameterError);
        CHECK_THROWS_AS(fit_quadratic({{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}, {2.0, 1.0}}),
                        InvalidParameterError);
    }
}

TEST_CASE("band search core on synthetic probability curves") {
    SUBCASE("immediate acceptance at T = 1") {
        const TimeSearchResult r = search_time_band([](double) { return 0.125; });
        CHECK(r.time == 1.0);
        CHECK(r.probes.size() == 1);
        CHECK_FALSE(r.flagged);
    }

    SUBCASE("doubling alone can land in the band") {
        const TimeSearchResult r =
            search_time_band([](double t) { return std::min(1.0, t / 1000.0); });
        CHECK(r.time == 128.0);
        CHECK(r.probability == doctest::Approx(0.128));
        CHECK_FALSE(r.flagged);
        for (std::size_t i = 1; i < r.probes.size(); ++i) {
            CHECK(r.probes[i].time == 2.0 * r.probes[i - 1].time);
        }
    }

    SUBCASE("bisection refines a doubling overshoot") {
        auto p = [](double t) { return std::min(1.0, (t / 100.0) * (t / 100.0)); };
        const TimeSearchResult r = search_time_band(p);
        CHECK(r.time == 36.0);
        CHECK(r.probability == doctest::Approx(0.1296));
        CHECK_FALSE(r.flagged);
        // Doubling prefix strictly increasing, bisection strictly inside the
        // shrinking bracket.
        double lo = 32.0;
        double hi = 64.0;
        for (std::size_t i = 7; i < r.probes.size(); ++i) {
            CHECK(r.probes[i].time > lo);
            CHECK(r.probes[i].time < hi);
            (r.probes[i].probability < 0.12 ? lo : hi) = r.probes[i].time;
        }
    }

    SUBCASE("a curve stuck below the band exhausts the doubling range") {
        CHECK_THROWS_AS(search_time_band([](double) { return 0.01; }), TimeSearchError);
    }

    SUBCASE("a jump over the band flags the fallback probe") {
        const TimeSearchResult r =
            search_time_band([](double t) { return t < 64.0 ? 0.01 : 0.5; });
        CHECK(r.flagged);
        CHECK(r.time == 64.0);
        CHECK(r.probability == 0.5);
    }

    SUBCASE("overshoot already at T = 1 bisects toward zero then flags") {
        const TimeSearchResult r = search_time_band([](double) { return 0.5; });
        CHECK(r.flagged);
        CHECK(r.time == 1.0);
    }

    SUBCASE("invalid options are rejected") {
        TimeSearchOptions bad;
        bad.band_lo = 0.13;
        bad.band_hi = 0.12;
        CHECK_THROWS_AS(search_time_band([](double) { return 0.125; }, bad),
                        InvalidParameterError);
    }
}

TEST_CASE("time search on a real instance lands in the band") {
    Rng rng(0x4004);
    const ExactCoverInstance inst = generate_gusa(8, rng);
    const HamiltonianData hd = build_hamiltonian(inst);
    const auto targets = enumerate_satisfying(inst);
    REQUIRE(targets.size() == 1);

    EvolutionConfig evo;
    const TimeSearchResult r = find_time_for_band(hd, targets, evo);
    REQUIRE_FALSE(r.flagged);
    CHECK(r.probability >= 0.12);
    CHECK(r.probability <= 0.13);

    // Independent re-evaluation at the returned time.
    EvolutionConfig at_found = evo;
    at_found.total_time = r.time;
    const double p = success_probability(evolve(hd, at_found), targets);
    CHECK(p == doctest::Approx(r.probability).epsilon(1e-12));
    CHECK(p >= 0.12);
    CHECK(p <= 0.13);

    // Deterministic probe trail.
    const TimeSearchResult again = find_time_for_band(hd, targets, evo);
    REQUIRE(again.probes.size() == r.probes.size());
    for (std::size_t i = 0; i < r.probes.size(); ++i) {
        CHECK(again.probes[i].time == r.probes[i].time);
        CHECK(again.probes[i].probability == r.probes[i].probability);
    }

    // Grid scan of p(T): the band crossing the search found is real -- the
    // curve starts below the band floor and reaches it within the scan.
    double grid_max = 0.0;
    for (double t = 4.0; t <= 2.0 * r.time; t += 4.0) {
        EvolutionConfig cfg = evo;
        cfg.total_time = t;
        grid_max = std::max(grid_max, success_probability(evolve(hd, cfg), targets));
    }
    CHECK(grid_max >= 0.12);
}

TEST_CASE("median time sweep at desk scale") {
    SweepConfig cfg;
    cfg.master_seed = 2024;
    cfg.instances = 6;

    const MedianTimeSweepResult sweep = median_time_sweep(6, 8, cfg);
    REQUIRE(sweep.table.size() == 3);
    REQUIRE(sweep.records.size() == 18);

    for (const MedianTimeRow& row : sweep.table) {
        CHECK(row.searched == 6);
        CHECK(row.flagged == 0);
        CHECK(row.time.lower <= row.time.median);
        CHECK(row.time.median <= row.time.upper);
    }
    // Harder instances need more time.
    CHECK(sweep.table.back().time.median > sweep.table.front().time.median);

    // Every unflagged record sits inside the probability band.
    for (const EnsembleRecord& rec : sweep.records) {
        REQUIRE_FALSE(rec.flagged);
        CHECK(rec.probability >= 0.12);
        CHECK(rec.probability <= 0.13);
        CHECK(rec.satisfiable);
        CHECK(rec.num_satisfying == 1);
        CHECK_FALSE(rec.probes.empty());
    }

    // Three bit counts -> the quadratic fit is available and interpolates the
    // medians exactly.
    REQUIRE(sweep.fit.has_value());
    for (const MedianTimeRow& row : sweep.table) {
        CHECK((*sweep.fit)(row.n) == doctest::Approx(row.time.median).epsilon(1e-9));
    }

    // Bitwise reproducibility of the whole sweep.
    const MedianTimeSweepResult rerun = median_time_sweep(6, 8, cfg);
    CHECK(records_csv(rerun.records) == records_csv(sweep.records));
}

TEST_CASE("sweep output is identical for any worker count") {
    SweepConfig base;
    base.master_seed = 99;
    base.instances = 4;
    base.calibrate = false;

    SweepConfig threaded = base;
    threaded.workers = 3;

    const std::string solo = records_csv(median_time_sweep(6, 7, base).records);
    const std::string multi = records_csv(median_time_sweep(6, 7, threaded).records);
    CHECK(solo == multi);
    CHECK(solo.starts_with("seed,n,clauses,satisfiable,num_sat,T,prob,flag\n"));
}

TEST_CASE("fixed-time sweep runs fresh instances at the fitted time") {
    SweepConfig search_cfg;
    search_cfg.master_seed = 31;
    search_cfg.instances = 8;
    const MedianTimeSweepResult medians = median_time_sweep(6, 8, search_cfg);
    REQUIRE(medians.fit.has_value());

    SweepConfig run_cfg;
    run_cfg.master_seed = 32;
    run_cfg.instances = 12;
    const FixedTimeSweepResult sweep =
        fixed_time_sweep(6, 8, *medians.fit, run_cfg, /*histogram=*/true);

    REQUIRE(sweep.rows.size() == 3);
    for (const FixedTimeRow& row : sweep.rows) {
        CHECK(row.run_time == doctest::Approx((*medians.fit)(row.n)).epsilon(1e-12));
        CHECK(row.lowest <= row.tenth_lowest);
        CHECK(row.lowest <= row.median);
        CHECK(row.median >= 0.10);  // close to 1/8 when run at the fitted time
        CHECK(row.median <= 0.16);
        REQUIRE(row.histogram.size() == 100);
        int total = 0;
        for (int c : row.histogram) total += c;
        CHECK(total == 12);
    }
    for (const EnsembleRecord& rec : sweep.records) {
        CHECK(rec.probability >= 0.0);
        CHECK(rec.probability <= 1.0);
    }
}

TEST_CASE("clause sweep categories and cross-check") {
    SweepConfig search_cfg;
    search_cfg.master_seed = 71;
    search_cfg.instances = 6;
    const MedianTimeSweepResult medians = median_time_sweep(5, 7, search_cfg);
    REQUIRE(medians.fit.has_value());

    SweepConfig cfg;
    cfg.master_seed = 72;
    cfg.instances = 3;
    cfg.quota_attempt_factor = 40;
    const ClauseSweepResult sweep = clause_sweep(6, 1, 9, *medians.fit, cfg);
    REQUIRE(sweep.rows.size() == 9);

    // One clause is always satisfiable: the unsatisfiable category must come
    // up empty and be reported incomplete after the attempt cap.
    const ClauseSweepRow& first = sweep.rows.front();
    CHECK(first.clause_count == 1);
    CHECK(first.satisfiable.complete);
    CHECK(first.satisfiable.generated == 3);
    CHECK_FALSE(first.unsatisfiable.complete);
    CHECK(first.unsatisfiable.generated == 0);
    CHECK(first.attempts == 3 * 40);

    for (const ClauseSweepRow& row : sweep.rows) {
        for (const ClauseCategoryStats& st : {row.satisfiable, row.unsatisfiable}) {
            if (st.generated > 0) {
                CHECK(st.worst <= st.tenth_worst);
                CHECK(st.worst <= st.median);
                CHECK(st.median <= 1.0);
                CHECK(st.worst >= 0.0);
            }
        }
    }

    // Re-running one recorded instance directly reproduces its probability.
    const EnsembleRecord& rec = sweep.records.front();
    Rng rng(rec.seed);
    const ExactCoverInstance inst = generate_fixed_clauses(6, rec.clause_count, rng);
    const MinimalViolationSet mv = minimal_violation_set(inst);
    CHECK((mv.min_violations == 0) == rec.satisfiable);
    EvolutionConfig run;
    run.total_time = rec.run_time;
    const double p = success_probability(evolve(build_hamiltonian(inst), run), mv.argmin);
    CHECK(p == doctest::Approx(rec.probability).epsilon(1e-12));
}

TEST_CASE("phase transition scan classifies by the oracle") {
    SweepConfig cfg;
    cfg.master_seed = 81;
    cfg.instances = 60;
    const PhaseScanResult scan = phase_transition_scan(8, 1, 16, cfg);
    REQUIRE(scan.rows.size() == 16);

    CHECK(scan.rows.front().fraction_unsat == 0.0);  // one clause: always satisfiable
    const double slack = 2.0 / std::sqrt(60.0);
    for (std::size_t i = 0; i < scan.rows.size(); ++i) {
        CHECK(scan.rows[i].fraction_unsat >= 0.0);
        CHECK(scan.rows[i].fraction_unsat <= 1.0);
        CHECK(scan.rows[i].fraction_usa >= 0.0);
        CHECK(scan.rows[i].fraction_usa <= 1.0);
        if (i > 0) {
            CHECK(scan.rows[i].fraction_unsat >=
                  scan.rows[i - 1].fraction_unsat - slack);
        }
    }
    CHECK(scan.rows.back().fraction_unsat > 0.5);

    // Records carry the oracle classification.
    for (const EnsembleRecord& rec : scan.records) {
        CHECK(rec.satisfiable == (rec.num_satisfying > 0));
        CHECK(rec.run_time == 0.0);
    }
}

TEST_CASE("records CSV format") {
    EnsembleRecord rec;
    rec.seed = 12345;
    rec.n = 8;
    rec.clause_count = 9;
    rec.satisfiable = true;
    rec.num_satisfying = 1;
    rec.run_time = 42.5;
    rec.probability = 0.127;
    rec.flagged = false;
    const std::string csv = records_csv({rec});
    CHECK(csv ==
          "seed,n,clauses,satisfiable,num_sat,T,prob,flag\n"
          "12345,8,9,1,1,42.5,0.127,0\n");
}

TEST_CASE("fit file transport round trip") {
    QuadraticFit fit;
    fit.coefficients = Eigen::Vector3d(1.5, -0.25, 0.75);
    fit.points = {{8.0, 60.0}, {9.0, 75.0}, {10.0, 95.0}};
    const std::string path = "fit_roundtrip_test.json";
    write_fit_file(path, fit);
    const QuadraticFit back = read_fit_file(path);
    CHECK(back.coefficients == fit.coefficients);
    REQUIRE(back.points.size() == 3);
    CHECK(back.points[2].second == 95.0);
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_fit_file("does_not_exist.json"), InvalidParameterError);
}
