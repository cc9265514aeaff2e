#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aqc/errors.hpp"
#include "aqc/evolution.hpp"
#include "aqc/experiments.hpp"
#include "aqc/hamiltonian.hpp"
#include "aqc/instance.hpp"
#include "aqc/report.hpp"
#include "aqc/rng.hpp"

namespace aqcsim {

namespace {

using aqc::format_double;

struct GenArgs {
    std::string mode = "gusa";
    int n = 8;
    int m = -1;
    std::uint64_t seed = 1;
    int retry_limit = 10000;
    std::string out;
};

struct EvolveArgs {
    std::string instance;
    double total_time = 0.0;
    double norm_tol = 1e-6;
    double dt = 0.0;
    int halvings = 0;
    std::string dump;
    std::string out;
};

struct SearchArgs {
    std::string instance;
    double band_lo = 0.12;
    double band_hi = 0.13;
    double t_max = 1048576.0;
    double norm_tol = 1e-6;
    double dt = 0.0;
    int halvings = 0;
    std::string out;
};

struct FitArgs {
    std::string in;
    std::string out;
};

struct SweepArgs {
    std::string kind;
    int n_min = 8;
    int n_max = 10;
    int n = 10;
    int m_min = 1;
    int m_max = 20;
    std::uint64_t seed = 1;
    int instances = 25;
    int workers = 1;
    double band_lo = 0.12;
    double band_hi = 0.13;
    double t_max = 1048576.0;
    double norm_tol = 1e-6;
    double oracle_tol = 1e-6;
    double dt = 0.0;
    bool no_calibrate = false;
    bool histogram = false;
    int attempt_factor = 200;
    std::string fit_in;
    std::string fit_out;
    std::string out;
    std::string format = "both";
};

void cmd_gen(const GenArgs& a, std::ostream& out) {
    std::optional<aqc::ExactCoverInstance> inst;
    aqc::Rng rng(a.seed);
    if (a.mode == "gusa") {
        if (a.m >= 0) {
            throw aqc::InvalidParameterError("--m is only valid with --mode fixed");
        }
        inst = aqc::generate_gusa(a.n, rng, {a.retry_limit});
    } else if (a.mode == "fixed") {
        if (a.m < 0) {
            throw aqc::InvalidParameterError("--mode fixed requires --m");
        }
        inst = aqc::generate_fixed_clauses(a.n, a.m, rng);
    } else {
        throw aqc::InvalidParameterError("--mode must be gusa or fixed");
    }
    aqc::write_instance_file(a.out, *inst);
    out << "n=" << inst->n() << " clauses=" << inst->clause_count()
        << " satisfying=" << aqc::enumerate_satisfying(*inst).size() << '\n';
}

void cmd_evolve(const EvolveArgs& a, std::ostream& out) {
    const aqc::ExactCoverInstance inst = aqc::read_instance_file(a.instance);
    const aqc::HamiltonianData hd = aqc::build_hamiltonian(inst);
    const aqc::MinimalViolationSet mv = aqc::minimal_violation_set(inst);

    aqc::EvolutionConfig cfg;
    cfg.total_time = a.total_time;
    cfg.norm_tolerance = a.norm_tol;
    cfg.dt = a.dt;
    cfg.step_halvings = a.halvings;

    aqc::EvolveStats stats;
    const aqc::StateVector psi = aqc::evolve(hd, cfg, &stats);
    const double p = aqc::success_probability(psi, mv.argmin);

    out << "n=" << inst.n() << " clauses=" << inst.clause_count()
        << " satisfiable=" << (mv.min_violations == 0 ? 1 : 0);
    if (mv.min_violations > 0) out << " min_violations=" << mv.min_violations;
    out << " num_targets=" << mv.argmin.size() << " T=" << format_double(a.total_time)
        << " probability=" << format_double(p) << '\n';

    if (!a.dump.empty()) {
        std::ofstream dump_out(a.dump, std::ios::binary);
        if (!dump_out) throw aqc::InvalidParameterError("cannot open dump file: " + a.dump);
        aqc::write_state_json(dump_out, psi);
    }
    if (!a.out.empty()) {
        nlohmann::json report{
            {"n", inst.n()},
            {"clauses", inst.clause_count()},
            {"satisfiable", mv.min_violations == 0},
            {"min_violations", mv.min_violations},
            {"num_targets", mv.argmin.size()},
            {"T", a.total_time},
            {"probability", p},
            {"norm_drift", stats.norm_drift},
            {"steps", stats.steps},
            {"dt", stats.dt},
        };
        aqc::write_text_file(a.out, report.dump(2) + "\n");
    }
}

void cmd_search(const SearchArgs& a, std::ostream& out) {
    const aqc::ExactCoverInstance inst = aqc::read_instance_file(a.instance);
    const aqc::HamiltonianData hd = aqc::build_hamiltonian(inst);
    const aqc::MinimalViolationSet mv = aqc::minimal_violation_set(inst);

    aqc::EvolutionConfig base;
    base.norm_tolerance = a.norm_tol;
    base.dt = a.dt;
    base.step_halvings = a.halvings;
    aqc::TimeSearchOptions opts;
    opts.band_lo = a.band_lo;
    opts.band_hi = a.band_hi;
    opts.t_max = a.t_max;

    const aqc::TimeSearchResult r = aqc::find_time_for_band(hd, mv.argmin, base, opts);
    out << "T=" << format_double(r.time) << " probability=" << format_double(r.probability)
        << " probes=" << r.probes.size() << " flagged=" << (r.flagged ? 1 : 0) << '\n';

    if (!a.out.empty()) {
        nlohmann::json probes = nlohmann::json::array();
        for (const aqc::TimeProbe& p : r.probes) probes.push_back({p.time, p.probability});
        nlohmann::json report{
            {"T", r.time},
            {"probability", r.probability},
            {"flagged", r.flagged},
            {"band_lo", a.band_lo},
            {"band_hi", a.band_hi},
            {"probes", probes},
        };
        aqc::write_text_file(a.out, report.dump(2) + "\n");
    }
}

void cmd_fit(const FitArgs& a, std::ostream& out) {
    std::ifstream in(a.in);
    if (!in) throw aqc::InvalidParameterError("cannot open input file: " + a.in);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw aqc::InvalidParameterError(std::string("input is not valid JSON: ") + e.what());
    }

    std::vector<std::pair<double, double>> points;
    if (doc.contains("table") && doc["table"].is_array()) {
        for (const auto& row : doc["table"]) {
            if (row.contains("n") && row.contains("median_T")) {
                points.emplace_back(row["n"].get<double>(), row["median_T"].get<double>());
            }
        }
    } else if (doc.contains("points") && doc["points"].is_array()) {
        for (const auto& pt : doc["points"]) {
            if (pt.is_array() && pt.size() == 2) {
                points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
            }
        }
    }
    if (points.empty()) {
        throw aqc::InvalidParameterError(
            "input needs a median-time \"table\" or a \"points\" array");
    }

    const aqc::QuadraticFit fit = aqc::fit_quadratic(points);
    aqc::write_fit_file(a.out, fit);
    out << "T(n) = " << format_double(fit.coefficients[0]) << " + "
        << format_double(fit.coefficients[1]) << " n + "
        << format_double(fit.coefficients[2]) << " n^2  (" << points.size() << " points)\n";
}

aqc::SweepConfig sweep_config(const SweepArgs& a) {
    aqc::SweepConfig cfg;
    cfg.master_seed = a.seed;
    cfg.instances = a.instances;
    cfg.workers = a.workers;
    cfg.search.band_lo = a.band_lo;
    cfg.search.band_hi = a.band_hi;
    cfg.search.t_max = a.t_max;
    cfg.evolution.norm_tolerance = a.norm_tol;
    cfg.evolution.oracle_tolerance = a.oracle_tol;
    cfg.evolution.dt = a.dt;
    cfg.calibrate = !a.no_calibrate;
    cfg.quota_attempt_factor = a.attempt_factor;
    return cfg;
}

void write_sweep_outputs(const SweepArgs& a, const std::vector<aqc::EnsembleRecord>& records,
                         const nlohmann::json& summary, std::ostream& out) {
    if (a.format != "csv" && a.format != "json" && a.format != "both") {
        throw aqc::InvalidParameterError("--format must be csv, json, or both");
    }
    if (a.format != "json") {
        aqc::write_text_file(a.out + ".csv", aqc::records_csv(records));
        out << "wrote " << a.out << ".csv (" << records.size() << " records)\n";
    }
    if (a.format != "csv") {
        aqc::write_text_file(a.out + ".json", summary.dump(2) + "\n");
        out << "wrote " << a.out << ".json\n";
    }
}

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
    const aqc::SweepConfig cfg = sweep_config(a);

    if (a.kind == "median-time") {
        const aqc::MedianTimeSweepResult sweep = aqc::median_time_sweep(a.n_min, a.n_max, cfg);
        for (const aqc::MedianTimeRow& row : sweep.table) {
            out << "n=" << row.n << " median_T=" << format_double(row.time.median) << " ci=["
                << format_double(row.time.lower) << ", " << format_double(row.time.upper)
                << "] searched=" << row.searched << " flagged=" << row.flagged << '\n';
        }
        write_sweep_outputs(a, sweep.records,
                            aqc::median_time_summary(sweep, cfg, a.n_min, a.n_max), out);
        if (!a.fit_out.empty()) {
            if (!sweep.fit) {
                throw aqc::InvalidParameterError(
                    "--fit-out needs at least 3 bit counts in the sweep");
            }
            aqc::write_fit_file(a.fit_out, *sweep.fit);
            out << "wrote " << a.fit_out << '\n';
        }
    } else if (a.kind == "fixed-T") {
        if (a.fit_in.empty()) throw aqc::InvalidParameterError("--kind fixed-T requires --fit");
        const aqc::QuadraticFit fit = aqc::read_fit_file(a.fit_in);
        const aqc::FixedTimeSweepResult sweep =
            aqc::fixed_time_sweep(a.n_min, a.n_max, fit, cfg, a.histogram);
        for (const aqc::FixedTimeRow& row : sweep.rows) {
            out << "n=" << row.n << " T=" << format_double(row.run_time)
                << " median=" << format_double(row.median)
                << " tenth_lowest=" << format_double(row.tenth_lowest)
                << " lowest=" << format_double(row.lowest) << '\n';
        }
        write_sweep_outputs(a, sweep.records,
                            aqc::fixed_time_summary(sweep, cfg, fit, a.n_min, a.n_max), out);
    } else if (a.kind == "clauses") {
        if (a.fit_in.empty()) throw aqc::InvalidParameterError("--kind clauses requires --fit");
        const aqc::QuadraticFit fit = aqc::read_fit_file(a.fit_in);
        const aqc::ClauseSweepResult sweep = aqc::clause_sweep(a.n, a.m_min, a.m_max, fit, cfg);
        for (const aqc::ClauseSweepRow& row : sweep.rows) {
            out << "m=" << row.clause_count;
            auto show = [&](const char* name, const aqc::ClauseCategoryStats& st) {
                out << ' ' << name << "=(";
                if (st.generated > 0) {
                    out << "median " << format_double(st.median) << ", worst "
                        << format_double(st.worst) << ", " << st.generated << "/" << st.quota;
                } else {
                    out << "empty after " << row.attempts << " attempts";
                }
                out << ')';
            };
            show("sat", row.satisfiable);
            show("unsat", row.unsatisfiable);
            out << '\n';
        }
        write_sweep_outputs(a, sweep.records,
                            aqc::clause_sweep_summary(sweep, cfg, fit, a.n, a.m_min, a.m_max),
                            out);
    } else if (a.kind == "phase") {
        const aqc::PhaseScanResult scan = aqc::phase_transition_scan(a.n, a.m_min, a.m_max, cfg);
        for (const aqc::PhaseRow& row : scan.rows) {
            out << "m=" << row.clause_count
                << " fraction_unsat=" << format_double(row.fraction_unsat)
                << " fraction_usa=" << format_double(row.fraction_usa) << '\n';
        }
        write_sweep_outputs(a, scan.records,
                            aqc::phase_scan_summary(scan, cfg, a.n, a.m_min, a.m_max), out);
    } else {
        throw aqc::InvalidParameterError(
            "--kind must be median-time, fixed-T, clauses, or phase");
    }
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum adiabatic evolution simulator for random Exact Cover instances"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a random instance file");
    gen_cmd->add_option("--mode", gen.mode, "Generator: gusa or fixed")
        ->check(CLI::IsMember({"gusa", "fixed"}));
    gen_cmd->add_option("--n", gen.n, "Number of bits")->required()->check(CLI::Range(3, 24));
    gen_cmd->add_option("--m", gen.m, "Clause count (fixed mode only)");
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_option("--retry-limit", gen.retry_limit, "GUSA restart budget")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--out", gen.out, "Instance file to write")->required();

    EvolveArgs ev;
    CLI::App* evolve_cmd =
        app.add_subcommand("evolve", "Integrate one instance and report success probability");
    evolve_cmd->add_option("--instance", ev.instance, "Instance JSON file")->required();
    evolve_cmd->add_option("--T", ev.total_time, "Total run time")
        ->required()
        ->check(CLI::NonNegativeNumber);
    evolve_cmd->add_option("--norm-tol", ev.norm_tol, "Norm-drift tolerance");
    evolve_cmd->add_option("--dt", ev.dt, "Base integrator step (0 = automatic)");
    evolve_cmd->add_option("--halvings", ev.halvings, "Extra step halvings");
    evolve_cmd->add_option("--dump", ev.dump, "State dump file (n <= 10)");
    evolve_cmd->add_option("--out", ev.out, "JSON report file");

    SearchArgs se;
    CLI::App* search_cmd =
        app.add_subcommand("search", "Find a run time whose success probability is in the band");
    search_cmd->add_option("--instance", se.instance, "Instance JSON file")->required();
    search_cmd->add_option("--band-lo", se.band_lo, "Band floor");
    search_cmd->add_option("--band-hi", se.band_hi, "Band ceiling");
    search_cmd->add_option("--t-max", se.t_max, "Doubling limit");
    search_cmd->add_option("--norm-tol", se.norm_tol, "Norm-drift tolerance");
    search_cmd->add_option("--dt", se.dt, "Base integrator step (0 = automatic)");
    search_cmd->add_option("--halvings", se.halvings, "Extra step halvings");
    search_cmd->add_option("--out", se.out, "JSON report file");

    FitArgs fi;
    CLI::App* fit_cmd =
        app.add_subcommand("fit", "Fit T(n) = a0 + a1 n + a2 n^2 to median times");
    fit_cmd->add_option("--in", fi.in, "Median-time summary JSON or {\"points\": [[n,T],...]}")
        ->required();
    fit_cmd->add_option("--out", fi.out, "Fit JSON file to write")->required();

    SweepArgs sw;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run an ensemble experiment");
    sweep_cmd->add_option("--kind", sw.kind, "median-time, fixed-T, clauses, or phase")
        ->required();
    sweep_cmd->add_option("--n-min", sw.n_min, "Smallest bit count");
    sweep_cmd->add_option("--n-max", sw.n_max, "Largest bit count");
    sweep_cmd->add_option("--n", sw.n, "Bit count (clauses/phase kinds)");
    sweep_cmd->add_option("--m-min", sw.m_min, "Smallest clause count");
    sweep_cmd->add_option("--m-max", sw.m_max, "Largest clause count");
    sweep_cmd->add_option("--seed", sw.seed, "Master seed");
    sweep_cmd->add_option("--instances", sw.instances, "Instances per point")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--workers", sw.workers, "Parallel evolutions")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--band-lo", sw.band_lo, "Band floor");
    sweep_cmd->add_option("--band-hi", sw.band_hi, "Band ceiling");
    sweep_cmd->add_option("--t-max", sw.t_max, "Doubling limit");
    sweep_cmd->add_option("--norm-tol", sw.norm_tol, "Norm-drift tolerance");
    sweep_cmd->add_option("--oracle-tol", sw.oracle_tol, "Self-check tolerance");
    sweep_cmd->add_option("--dt", sw.dt, "Base integrator step (0 = automatic)");
    sweep_cmd->add_flag("--no-calibrate", sw.no_calibrate, "Skip the step self-check");
    sweep_cmd->add_flag("--histogram", sw.histogram, "Emit probability histograms (fixed-T)");
    sweep_cmd->add_option("--attempt-factor", sw.attempt_factor,
                          "Generation attempts per quota slot (clauses)")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--fit", sw.fit_in, "Fit JSON file (fixed-T and clauses)");
    sweep_cmd->add_option("--fit-out", sw.fit_out, "Write the fitted T(n) (median-time)");
    sweep_cmd->add_option("--out", sw.out, "Output base path (.csv/.json appended)")->required();
    sweep_cmd->add_option("--format", sw.format, "Outputs to write: csv, json, or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
        if (gen_cmd->parsed()) cmd_gen(gen, out);
        if (evolve_cmd->parsed()) cmd_evolve(ev, out);
        if (search_cmd->parsed()) cmd_search(se, out);
        if (fit_cmd->parsed()) cmd_fit(fi, out);
        if (sweep_cmd->parsed()) cmd_sweep(sw, out);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidInput;
    } catch (const aqc::IntegrationAccuracyError& e) {
        err << "error: " << e.what() << '\n';
        return kExitAccuracy;
    } catch (const aqc::TimeSearchError& e) {
        err << "error: " << e.what() << '\n';
        return kExitAccuracy;
    } catch (const aqc::GenerationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitGeneration;
    } catch (const aqc::Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    }
}

}  // namespace aqcsim
