#ifndef AQC_EXPERIMENTS_HPP
#define AQC_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "aqc/evolution.hpp"
#include "aqc/hamiltonian.hpp"
#include "aqc/instance.hpp"

namespace aqc {

struct TimeProbe {
    double time = 0.0;
    double probability = 0.0;
};

// One instance's result within an ensemble.  CSV row format:
// seed,n,clauses,satisfiable,num_sat,T,prob,flag
struct EnsembleRecord {
    std::uint64_t seed = 0;
    int n = 0;
    int clause_count = 0;
    bool satisfiable = false;
    std::uint64_t num_satisfying = 0;
    double run_time = 0.0;
    double probability = 0.0;
    bool flagged = false;
    std::vector<TimeProbe> probes;  // populated by time-search runs
};

// Distribution-free median confidence interval from binomial order
// statistics; endpoints are always sample values.
struct MedianCi {
    double median = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};
MedianCi median_with_ci(std::vector<double> samples, double level = 0.95);

// Least-squares T(n) = a0 + a1 n + a2 n^2.
struct QuadraticFit {
    Eigen::Vector3d coefficients = Eigen::Vector3d::Zero();
    std::vector<std::pair<double, double>> points;
    Eigen::VectorXd residuals;  // observed - fitted, per point

    double operator()(double x) const {
        return coefficients[0] + x * (coefficients[1] + x * coefficients[2]);
    }
};
QuadraticFit fit_quadratic(std::vector<std::pair<double, double>> points);

struct TimeSearchOptions {
    double band_lo = 0.12;
    double band_hi = 0.13;
    double t_max = 1048576.0;  // 2^20
    int max_doublings = 20;
    int max_bisections = 60;
};

struct TimeSearchResult {
    double time = 0.0;
    double probability = 0.0;
    bool flagged = false;  // band never entered; fell back to first p >= band_lo
    std::vector<TimeProbe> probes;
};

// Hunt for a run time whose success probability lands in [band_lo, band_hi]:
// start at T=1, double until p >= band_lo, then bisect, accepting the first
// in-band probe.  The core works on any probability function so the search
// logic can be exercised without evolution.
TimeSearchResult search_time_band(const std::function<double(double)>& probability_at,
                                  const TimeSearchOptions& opts = {});

TimeSearchResult find_time_for_band(const HamiltonianData& hd,
                                    std::span<const Assignment> targets,
                                    const EvolutionConfig& base,
                                    const TimeSearchOptions& opts = {});

// Shared knobs for ensemble runs.  Per-instance seeds derive from
// (master_seed, sweep kind, coordinates), so output never depends on worker
// count or execution order.
struct SweepConfig {
    std::uint64_t master_seed = 1;
    int instances = 75;
    int workers = 1;
    GusaOptions gusa;
    TimeSearchOptions search;
    EvolutionConfig evolution;  // total_time is driven per run
    bool calibrate = true;      // step self-check at the start of each ensemble
    int quota_attempt_factor = 200;  // generation cap per clause-sweep category
};

struct MedianTimeRow {
    int n = 0;
    int searched = 0;  // records with a usable time
    int flagged = 0;
    MedianCi time;
};
struct MedianTimeSweepResult {
    std::vector<MedianTimeRow> table;
    std::vector<EnsembleRecord> records;
    std::optional<QuadraticFit> fit;  // present when >= 3 bit counts
};
// Per n: generate `instances` fresh GUSA instances, search each for the band
// time, report the median with its confidence interval.
MedianTimeSweepResult median_time_sweep(int n_min, int n_max, const SweepConfig& cfg);

struct FixedTimeRow {
    int n = 0;
    double run_time = 0.0;
    double median = 0.0;
    double tenth_lowest = 0.0;
    double lowest = 0.0;
    std::vector<int> histogram;  // 100 bins of width 0.01 when requested
};
struct FixedTimeSweepResult {
    std::vector<FixedTimeRow> rows;
    std::vector<EnsembleRecord> records;
};
// Fresh GUSA instances run at the fitted time T(n).
FixedTimeSweepResult fixed_time_sweep(int n_min, int n_max, const QuadraticFit& fit,
                                      const SweepConfig& cfg, bool histogram = false);

struct ClauseCategoryStats {
    int quota = 0;
    int generated = 0;
    double median = 0.0;
    double tenth_worst = 0.0;
    double worst = 0.0;
    bool complete = false;  // quota reached before the attempt cap
};
struct ClauseSweepRow {
    int clause_count = 0;
    std::int64_t attempts = 0;
    ClauseCategoryStats satisfiable;
    ClauseCategoryStats unsatisfiable;
};
struct ClauseSweepResult {
    std::vector<ClauseSweepRow> rows;
    std::vector<EnsembleRecord> records;
};
// Fixed-clause-count instances at T(n), split by the classical oracle into
// satisfiable (targets: satisfying assignments) and unsatisfiable (targets:
// minimal-violation assignments).  Generates until each category reaches its
// quota or the attempt cap; an unreachable category is reported incomplete.
ClauseSweepResult clause_sweep(int n, int m_min, int m_max, const QuadraticFit& fit,
                               const SweepConfig& cfg);

struct PhaseRow {
    int clause_count = 0;
    int instances = 0;
    double fraction_unsat = 0.0;
    double fraction_usa = 0.0;
};
struct PhaseScanResult {
    std::vector<PhaseRow> rows;
    std::vector<EnsembleRecord> records;
};
// Classification-only sweep over clause counts: fraction of instances with
// no satisfying assignment and fraction with a unique one.
PhaseScanResult phase_transition_scan(int n, int m_min, int m_max, const SweepConfig& cfg);

}  // namespace aqc

#endif
