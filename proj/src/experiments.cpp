#include "aqc/experiments.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include "aqc/errors.hpp"
#include "aqc/rng.hpp"

namespace aqc {

namespace {

// Seed-stream tags keep the sweep kinds statistically independent even under
// a shared master seed.
enum SweepStream : std::uint64_t {
    stream_median_time = 1,
    stream_fixed_time = 2,
    stream_clauses = 3,
    stream_phase = 4,
};

// Reference run time for the step self-check in sweeps that have no fitted
// T(n) to calibrate against.
constexpr double kCalibrationRunTime = 100.0;

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    workers = std::clamp(workers, 1, std::max(count, 1));
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto drain = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

double binomial_pmf_half(std::size_t m, std::size_t j) {
    const double dm = static_cast<double>(m);
    const double dj = static_cast<double>(j);
    return std::exp(std::lgamma(dm + 1.0) - std::lgamma(dj + 1.0) -
                    std::lgamma(dm - dj + 1.0) - dm * std::log(2.0));
}

double sample_median(const std::vector<double>& sorted) {
    const std::size_t m = sorted.size();
    return m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
}

std::string probe_trace(const std::vector<TimeProbe>& probes) {
    std::ostringstream out;
    for (const TimeProbe& p : probes) out << " (" << p.time << ", " << p.probability << ")";
    return out.str();
}

void check_sweep_range(int n_min, int n_max) {
    if (n_min < 3 || n_max > kMaxBits || n_min > n_max) {
        throw InvalidParameterError("bit-count range must satisfy 3 <= n_min <= n_max <= " +
                                    std::to_string(kMaxBits));
    }
}

// Ensemble-start convergence self-check; returns the step halvings to use.
// Falls back to the configured value when the probe instance itself fails.
int ensemble_halvings(const HamiltonianData& hd, const EvolutionConfig& evo,
                      double run_time, bool enabled) {
    if (!enabled) return evo.step_halvings;
    EvolutionConfig probe = evo;
    probe.total_time = run_time;
    return calibrate_step_halvings(hd, probe);
}

double fitted_run_time(const QuadraticFit& fit, int n) {
    const double t = fit(static_cast<double>(n));
    if (!(t > 0.0)) {
        throw InvalidParameterError("fitted run time is not positive at n=" +
                                    std::to_string(n));
    }
    return t;
}

struct CategoryProbs {
    std::vector<double> probs;

    ClauseCategoryStats stats(int quota) const {
        ClauseCategoryStats st;
        st.quota = quota;
        st.generated = static_cast<int>(probs.size());
        st.complete = st.generated == quota;
        if (!probs.empty()) {
            std::vector<double> sorted = probs;
            std::sort(sorted.begin(), sorted.end());
            st.median = sample_median(sorted);
            st.tenth_worst = sorted[std::min<std::size_t>(9, sorted.size() - 1)];
            st.worst = sorted.front();
        }
        return st;
    }
};

}  // namespace

MedianCi median_with_ci(std::vector<double> samples, double level) {
    const std::size_t m = samples.size();
    if (m < 2) throw InvalidParameterError("median CI needs at least 2 samples");
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidParameterError("confidence level must be in (0, 1)");
    }
    std::sort(samples.begin(), samples.end());

    MedianCi ci;
    ci.median = sample_median(samples);

    // Largest l (1-indexed order statistic) with P(Bin(m,1/2) < l) <= tail,
    // upper endpoint symmetric.  Clamped to the sample range for tiny m.
    const double tail = 0.5 * (1.0 - level);
    std::size_t l = 0;
    double cumulative = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        cumulative += binomial_pmf_half(m, j);
        if (cumulative > tail) break;
        l = j + 1;
    }
    l = std::max<std::size_t>(l, 1);
    const std::size_t u = m + 1 - l;
    ci.lower = samples[l - 1];
    ci.upper = samples[u - 1];
    return ci;
}

QuadraticFit fit_quadratic(std::vector<std::pair<double, double>> points) {
    std::vector<double> distinct;
    for (const auto& [x, y] : points) {
        if (std::find(distinct.begin(), distinct.end(), x) == distinct.end()) {
            distinct.push_back(x);
        }
    }
    if (distinct.size() < 3) {
        throw InvalidParameterError("quadratic fit needs >= 3 distinct abscissae, got " +
                                    std::to_string(distinct.size()));
    }

    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(m, 3);
    Eigen::VectorXd observed(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const double x = points[static_cast<std::size_t>(r)].first;
        design(r, 0) = 1.0;
        design(r, 1) = x;
        design(r, 2) = x * x;
        observed[r] = points[static_cast<std::size_t>(r)].second;
    }

    QuadraticFit fit;
    fit.coefficients = design.colPivHouseholderQr().solve(observed);
    fit.residuals = observed - design * fit.coefficients;
    fit.points = std::move(points);
    return fit;
}

TimeSearchResult search_time_band(const std::function<double(double)>& probability_at,
                                  const TimeSearchOptions& opts) {
    if (!(0.0 < opts.band_lo && opts.band_lo < opts.band_hi && opts.band_hi <= 1.0)) {
        throw InvalidParameterError("band must satisfy 0 < lo < hi <= 1");
    }
    if (!(opts.t_max >= 1.0)) throw InvalidParameterError("t_max must be >= 1");

    TimeSearchResult result;
    auto probe = [&](double t) {
        const double p = probability_at(t);
        result.probes.push_back({t, p});
        return p;
    };
    auto in_band = [&](double p) { return p >= opts.band_lo && p <= opts.band_hi; };
    auto accept = [&](double t, double p) {
        result.time = t;
        result.probability = p;
        return result;
    };

    double t = 1.0;
    double p = probe(t);
    if (in_band(p)) return accept(t, p);

    // Double until the band floor is reached; p(T) tends to 1 as T grows.
    double lo = 0.0;
    int doublings = 0;
    while (p < opts.band_lo) {
        if (doublings >= opts.max_doublings || t * 2.0 > opts.t_max) {
            throw TimeSearchError("time search exceeded T_max=" + std::to_string(opts.t_max) +
                                  "; probes:" + probe_trace(result.probes));
        }
        lo = t;
        t *= 2.0;
        ++doublings;
        p = probe(t);
        if (in_band(p)) return accept(t, p);
    }

    // Bracket [lo, t] has p below band on the left, above on the right.
    double hi = t;
    for (int iter = 0; iter < opts.max_bisections; ++iter) {
        const double mid = 0.5 * (lo + hi);
        p = probe(mid);
        if (in_band(p)) return accept(mid, p);
        (p < opts.band_lo ? lo : hi) = mid;
    }

    // Non-monotone crossing: settle for the first probe at or above the
    // floor and flag the record.
    for (const TimeProbe& pr : result.probes) {
        if (pr.probability >= opts.band_lo) {
            result.flagged = true;
            return accept(pr.time, pr.probability);
        }
    }
    throw TimeSearchError("bisection ended with no probe at or above the band floor; probes:" +
                          probe_trace(result.probes));
}

TimeSearchResult find_time_for_band(const HamiltonianData& hd,
                                    std::span<const Assignment> targets,
                                    const EvolutionConfig& base,
                                    const TimeSearchOptions& opts) {
    if (targets.empty()) {
        throw InvalidParameterError("time search needs a nonempty target set");
    }
    return search_time_band(
        [&](double t) {
            EvolutionConfig cfg = base;
            cfg.total_time = t;
            return success_probability(evolve(hd, cfg), targets);
        },
        opts);
}

MedianTimeSweepResult median_time_sweep(int n_min, int n_max, const SweepConfig& cfg) {
    check_sweep_range(n_min, n_max);
    if (cfg.instances < 2) throw InvalidParameterError("median sweep needs >= 2 instances per n");

    MedianTimeSweepResult result;
    for (int n = n_min; n <= n_max; ++n) {
        EvolutionConfig evo = cfg.evolution;
        try {
            Rng probe_rng(derive_seed(cfg.master_seed, stream_median_time, n, 0));
            const ExactCoverInstance probe_inst = generate_gusa(n, probe_rng, cfg.gusa);
            evo.step_halvings = ensemble_halvings(
                build_hamiltonian(probe_inst), evo,
                std::min(kCalibrationRunTime, cfg.search.t_max), cfg.calibrate);
        } catch (const Error&) {
            // The same seed fails identically in the worker and flags its record.
        }

        std::vector<EnsembleRecord> batch(static_cast<std::size_t>(cfg.instances));
        parallel_for(cfg.instances, cfg.workers, [&](int idx) {
            const std::uint64_t seed =
                derive_seed(cfg.master_seed, stream_median_time, n, static_cast<std::uint64_t>(idx));
            EnsembleRecord rec;
            rec.seed = seed;
            rec.n = n;
            try {
                Rng rng(seed);
                const ExactCoverInstance inst = generate_gusa(n, rng, cfg.gusa);
                rec.clause_count = inst.clause_count();
                const std::vector<Assignment> targets = enumerate_satisfying(inst);
                rec.satisfiable = true;
                rec.num_satisfying = targets.size();
                const HamiltonianData hd = build_hamiltonian(inst);
                const TimeSearchResult search = find_time_for_band(hd, targets, evo, cfg.search);
                rec.run_time = search.time;
                rec.probability = search.probability;
                rec.flagged = search.flagged;
                rec.probes = search.probes;
            } catch (const Error&) {
                rec.flagged = true;  // run_time stays 0: no usable search result
            }
            batch[static_cast<std::size_t>(idx)] = std::move(rec);
        });

        MedianTimeRow row;
        row.n = n;
        std::vector<double> times;
        for (const EnsembleRecord& rec : batch) {
            if (rec.run_time > 0.0) {
                times.push_back(rec.run_time);
                ++row.searched;
            }
            if (rec.flagged) ++row.flagged;
        }
        if (times.size() >= 2) {
            row.time = median_with_ci(times);
        } else if (times.size() == 1) {
            row.time = MedianCi{times.front(), times.front(), times.front()};
        }
        result.table.push_back(row);
        result.records.insert(result.records.end(), std::make_move_iterator(batch.begin()),
                              std::make_move_iterator(batch.end()));
    }

    std::vector<std::pair<double, double>> fit_points;
    for (const MedianTimeRow& row : result.table) {
        if (row.searched > 0) fit_points.emplace_back(row.n, row.time.median);
    }
    if (fit_points.size() >= 3) result.fit = fit_quadratic(std::move(fit_points));
    return result;
}

FixedTimeSweepResult fixed_time_sweep(int n_min, int n_max, const QuadraticFit& fit,
                                      const SweepConfig& cfg, bool histogram) {
    check_sweep_range(n_min, n_max);
    if (cfg.instances < 1) throw InvalidParameterError("sweep needs >= 1 instance per n");

    FixedTimeSweepResult result;
    for (int n = n_min; n <= n_max; ++n) {
        const double run_time = fitted_run_time(fit, n);
        EvolutionConfig evo = cfg.evolution;
        try {
            Rng probe_rng(derive_seed(cfg.master_seed, stream_fixed_time, n, 0));
            const ExactCoverInstance probe_inst = generate_gusa(n, probe_rng, cfg.gusa);
            evo.step_halvings =
                ensemble_halvings(build_hamiltonian(probe_inst), evo, run_time, cfg.calibrate);
        } catch (const Error&) {
        }

        std::vector<EnsembleRecord> batch(static_cast<std::size_t>(cfg.instances));
        parallel_for(cfg.instances, cfg.workers, [&](int idx) {
            const std::uint64_t seed =
                derive_seed(cfg.master_seed, stream_fixed_time, n, static_cast<std::uint64_t>(idx));
            EnsembleRecord rec;
            rec.seed = seed;
            rec.n = n;
            rec.run_time = run_time;
            try {
                Rng rng(seed);
                const ExactCoverInstance inst = generate_gusa(n, rng, cfg.gusa);
                rec.clause_count = inst.clause_count();
                const std::vector<Assignment> targets = enumerate_satisfying(inst);
                rec.satisfiable = true;
                rec.num_satisfying = targets.size();
                EvolutionConfig run = evo;
                run.total_time = run_time;
                rec.probability = success_probability(evolve(build_hamiltonian(inst), run), targets);
            } catch (const Error&) {
                rec.flagged = true;
            }
            batch[static_cast<std::size_t>(idx)] = std::move(rec);
        });

        FixedTimeRow row;
        row.n = n;
        row.run_time = run_time;
        std::vector<double> probs;
        for (const EnsembleRecord& rec : batch) {
            if (!rec.flagged) probs.push_back(rec.probability);
        }
        if (!probs.empty()) {
            std::sort(probs.begin(), probs.end());
            row.median = sample_median(probs);
            row.tenth_lowest = probs[std::min<std::size_t>(9, probs.size() - 1)];
            row.lowest = probs.front();
        }
        if (histogram) {
            row.histogram.assign(100, 0);
            for (double p : probs) {
                const int bin = std::min(static_cast<int>(p / 0.01), 99);
                ++row.histogram[static_cast<std::size_t>(bin)];
            }
        }
        result.rows.push_back(std::move(row));
        result.records.insert(result.records.end(), std::make_move_iterator(batch.begin()),
                              std::make_move_iterator(batch.end()));
    }
    return result;
}

ClauseSweepResult clause_sweep(int n, int m_min, int m_max, const QuadraticFit& fit,
                               const SweepConfig& cfg) {
    check_sweep_range(n, n);
    const std::int64_t max_m = static_cast<std::int64_t>(n) * (n - 1) * (n - 2) / 6;
    if (m_min < 1 || m_min > m_max || m_max > max_m) {
        throw InvalidParameterError("clause range must satisfy 1 <= m_min <= m_max <= C(n,3)");
    }
    if (cfg.instances < 1) throw InvalidParameterError("sweep needs >= 1 instance per category");

    const double run_time = fitted_run_time(fit, n);
    const int quota = cfg.instances;
    const std::int64_t attempt_cap =
        static_cast<std::int64_t>(quota) * std::max(cfg.quota_attempt_factor, 1);

    // One self-check for the whole sweep, taken at the largest clause count,
    // where the spectral bound (and therefore the stiffness) is greatest.
    EvolutionConfig evo = cfg.evolution;
    try {
        Rng probe_rng(derive_seed(cfg.master_seed, stream_clauses,
                                  static_cast<std::uint64_t>(m_max), 0));
        const ExactCoverInstance probe_inst = generate_fixed_clauses(n, m_max, probe_rng);
        evo.step_halvings =
            ensemble_halvings(build_hamiltonian(probe_inst), evo, run_time, cfg.calibrate);
    } catch (const Error&) {
    }

    ClauseSweepResult result;
    for (int m = m_min; m <= m_max; ++m) {
        // Classify sequentially until each category reaches quota or the cap.
        struct Candidate {
            std::uint64_t seed;
            ExactCoverInstance inst;
            bool satisfiable;
        };
        std::vector<Candidate> selected;
        int sat_count = 0;
        int unsat_count = 0;
        std::int64_t attempts = 0;
        while ((sat_count < quota || unsat_count < quota) && attempts < attempt_cap) {
            const std::uint64_t seed = derive_seed(cfg.master_seed, stream_clauses,
                                                   static_cast<std::uint64_t>(m),
                                                   static_cast<std::uint64_t>(attempts));
            ++attempts;
            Rng rng(seed);
            ExactCoverInstance inst = generate_fixed_clauses(n, m, rng);
            const bool satisfiable = !enumerate_satisfying(inst).empty();
            if (satisfiable && sat_count < quota) {
                selected.push_back({seed, std::move(inst), true});
                ++sat_count;
            } else if (!satisfiable && unsat_count < quota) {
                selected.push_back({seed, std::move(inst), false});
                ++unsat_count;
            }
        }

        std::vector<EnsembleRecord> batch(selected.size());
        parallel_for(static_cast<int>(selected.size()), cfg.workers, [&](int idx) {
            const Candidate& cand = selected[static_cast<std::size_t>(idx)];
            EnsembleRecord rec;
            rec.seed = cand.seed;
            rec.n = n;
            rec.clause_count = m;
            rec.satisfiable = cand.satisfiable;
            rec.run_time = run_time;
            try {
                const MinimalViolationSet mv = minimal_violation_set(cand.inst);
                rec.num_satisfying = cand.satisfiable ? mv.argmin.size() : 0;
                EvolutionConfig run = evo;
                run.total_time = run_time;
                rec.probability =
                    success_probability(evolve(build_hamiltonian(cand.inst), run), mv.argmin);
            } catch (const Error&) {
                rec.flagged = true;
            }
            batch[static_cast<std::size_t>(idx)] = std::move(rec);
        });

        ClauseSweepRow row;
        row.clause_count = m;
        row.attempts = attempts;
        CategoryProbs sat_probs;
        CategoryProbs unsat_probs;
        for (const EnsembleRecord& rec : batch) {
            if (rec.flagged) continue;
            (rec.satisfiable ? sat_probs : unsat_probs).probs.push_back(rec.probability);
        }
        row.satisfiable = sat_probs.stats(quota);
        row.unsatisfiable = unsat_probs.stats(quota);
        result.rows.push_back(row);
        result.records.insert(result.records.end(), std::make_move_iterator(batch.begin()),
                              std::make_move_iterator(batch.end()));
    }
    return result;
}

PhaseScanResult phase_transition_scan(int n, int m_min, int m_max, const SweepConfig& cfg) {
    check_sweep_range(n, n);
    const std::int64_t max_m = static_cast<std::int64_t>(n) * (n - 1) * (n - 2) / 6;
    if (m_min < 1 || m_min > m_max || m_max > max_m) {
        throw InvalidParameterError("clause range must satisfy 1 <= m_min <= m_max <= C(n,3)");
    }
    if (cfg.instances < 1) throw InvalidParameterError("scan needs >= 1 instance per clause count");

    PhaseScanResult result;
    for (int m = m_min; m <= m_max; ++m) {
        std::vector<EnsembleRecord> batch(static_cast<std::size_t>(cfg.instances));
        parallel_for(cfg.instances, cfg.workers, [&](int idx) {
            const std::uint64_t seed = derive_seed(cfg.master_seed, stream_phase,
                                                   static_cast<std::uint64_t>(m),
                                                   static_cast<std::uint64_t>(idx));
            Rng rng(seed);
            const ExactCoverInstance inst = generate_fixed_clauses(n, m, rng);
            EnsembleRecord rec;
            rec.seed = seed;
            rec.n = n;
            rec.clause_count = m;
            rec.num_satisfying = enumerate_satisfying(inst).size();
            rec.satisfiable = rec.num_satisfying > 0;
            batch[static_cast<std::size_t>(idx)] = std::move(rec);
        });

        PhaseRow row;
        row.clause_count = m;
        row.instances = cfg.instances;
        int unsat = 0;
        int usa = 0;
        for (const EnsembleRecord& rec : batch) {
            if (!rec.satisfiable) ++unsat;
            if (rec.num_satisfying == 1) ++usa;
        }
        row.fraction_unsat = static_cast<double>(unsat) / cfg.instances;
        row.fraction_usa = static_cast<double>(usa) / cfg.instances;
        result.rows.push_back(row);
        result.records.insert(result.records.end(), std::make_move_iterator(batch.begin()),
                              std::make_move_iterator(batch.end()));
    }
    return result;
}

}  // namespace aqc
