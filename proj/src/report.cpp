#include "aqc/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "aqc/errors.hpp"

namespace aqc {

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string records_csv(const std::vector<EnsembleRecord>& records) {
    std::ostringstream out;
    out << "seed,n,clauses,satisfiable,num_sat,T,prob,flag\n";
    for (const EnsembleRecord& rec : records) {
        out << rec.seed << ',' << rec.n << ',' << rec.clause_count << ','
            << (rec.satisfiable ? 1 : 0) << ',' << rec.num_satisfying << ','
            << format_double(rec.run_time) << ',' << format_double(rec.probability) << ','
            << (rec.flagged ? 1 : 0) << '\n';
    }
    return out.str();
}

void write_records_csv(std::ostream& out, const std::vector<EnsembleRecord>& records) {
    out << records_csv(records);
}

nlohmann::json config_json(const SweepConfig& cfg) {
    return {
        {"master_seed", cfg.master_seed},
        {"instances", cfg.instances},
        {"workers", cfg.workers},
        {"gusa_retry_limit", cfg.gusa.retry_limit},
        {"band_lo", cfg.search.band_lo},
        {"band_hi", cfg.search.band_hi},
        {"t_max", cfg.search.t_max},
        {"dt", cfg.evolution.dt},
        {"step_halvings", cfg.evolution.step_halvings},
        {"norm_tolerance", cfg.evolution.norm_tolerance},
        {"oracle_tolerance", cfg.evolution.oracle_tolerance},
        {"calibrate", cfg.calibrate},
        {"quota_attempt_factor", cfg.quota_attempt_factor},
    };
}

nlohmann::json fit_json(const QuadraticFit& fit) {
    nlohmann::json doc;
    doc["coefficients"] = {fit.coefficients[0], fit.coefficients[1], fit.coefficients[2]};
    auto& pts = doc["points"] = nlohmann::json::array();
    for (const auto& [x, y] : fit.points) pts.push_back({x, y});
    return doc;
}

QuadraticFit fit_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("coefficients") || !doc["coefficients"].is_array() ||
        doc["coefficients"].size() != 3) {
        throw InvalidParameterError("fit file needs a 3-entry \"coefficients\" array");
    }
    QuadraticFit fit;
    for (int i = 0; i < 3; ++i) {
        fit.coefficients[i] = doc["coefficients"][static_cast<std::size_t>(i)].get<double>();
    }
    if (doc.contains("points") && doc["points"].is_array()) {
        for (const auto& pt : doc["points"]) {
            if (pt.is_array() && pt.size() == 2) {
                fit.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
            }
        }
    }
    return fit;
}

QuadraticFit read_fit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameterError("cannot open fit file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameterError(std::string("fit file is not valid JSON: ") + e.what());
    }
    return fit_from_json(doc);
}

void write_fit_file(const std::string& path, const QuadraticFit& fit) {
    write_text_file(path, fit_json(fit).dump(2) + "\n");
}

namespace {

nlohmann::json probes_json(const std::vector<TimeProbe>& probes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TimeProbe& p : probes) arr.push_back({p.time, p.probability});
    return arr;
}

nlohmann::json record_json(const EnsembleRecord& rec, bool with_probes) {
    nlohmann::json doc{
        {"seed", rec.seed},
        {"n", rec.n},
        {"clauses", rec.clause_count},
        {"satisfiable", rec.satisfiable},
        {"num_sat", rec.num_satisfying},
        {"T", rec.run_time},
        {"prob", rec.probability},
        {"flag", rec.flagged},
    };
    if (with_probes) doc["probes"] = probes_json(rec.probes);
    return doc;
}

nlohmann::json records_json(const std::vector<EnsembleRecord>& records, bool with_probes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const EnsembleRecord& rec : records) arr.push_back(record_json(rec, with_probes));
    return arr;
}

}  // namespace

nlohmann::json median_time_summary(const MedianTimeSweepResult& sweep, const SweepConfig& cfg,
                                   int n_min, int n_max) {
    nlohmann::json table = nlohmann::json::array();
    for (const MedianTimeRow& row : sweep.table) {
        table.push_back({
            {"n", row.n},
            {"searched", row.searched},
            {"flagged", row.flagged},
            {"median_T", row.time.median},
            {"ci_lower", row.time.lower},
            {"ci_upper", row.time.upper},
        });
    }
    nlohmann::json doc{
        {"sweep", "median-time"},
        {"n_min", n_min},
        {"n_max", n_max},
        {"config", config_json(cfg)},
        {"table", table},
        {"records", records_json(sweep.records, true)},
    };
    if (sweep.fit) doc["fit"] = fit_json(*sweep.fit);
    return doc;
}

nlohmann::json fixed_time_summary(const FixedTimeSweepResult& sweep, const SweepConfig& cfg,
                                  const QuadraticFit& fit, int n_min, int n_max) {
    nlohmann::json table = nlohmann::json::array();
    for (const FixedTimeRow& row : sweep.rows) {
        nlohmann::json entry{
            {"n", row.n},
            {"T", row.run_time},
            {"median", row.median},
            {"tenth_lowest", row.tenth_lowest},
            {"lowest", row.lowest},
        };
        if (!row.histogram.empty()) entry["histogram"] = row.histogram;
        table.push_back(entry);
    }
    return {
        {"sweep", "fixed-T"},
        {"n_min", n_min},
        {"n_max", n_max},
        {"fit", fit_json(fit)},
        {"config", config_json(cfg)},
        {"table", table},
        {"records", records_json(sweep.records, false)},
    };
}

nlohmann::json clause_sweep_summary(const ClauseSweepResult& sweep, const SweepConfig& cfg,
                                    const QuadraticFit& fit, int n, int m_min, int m_max) {
    auto category = [](const ClauseCategoryStats& st) {
        return nlohmann::json{
            {"quota", st.quota},
            {"generated", st.generated},
            {"complete", st.complete},
            {"median", st.median},
            {"tenth_worst", st.tenth_worst},
            {"worst", st.worst},
        };
    };
    nlohmann::json table = nlohmann::json::array();
    for (const ClauseSweepRow& row : sweep.rows) {
        table.push_back({
            {"clauses", row.clause_count},
            {"attempts", row.attempts},
            {"satisfiable", category(row.satisfiable)},
            {"unsatisfiable", category(row.unsatisfiable)},
        });
    }
    return {
        {"sweep", "clauses"},
        {"n", n},
        {"m_min", m_min},
        {"m_max", m_max},
        {"fit", fit_json(fit)},
        {"config", config_json(cfg)},
        {"table", table},
        {"records", records_json(sweep.records, false)},
    };
}

nlohmann::json phase_scan_summary(const PhaseScanResult& scan, const SweepConfig& cfg, int n,
                                  int m_min, int m_max) {
    nlohmann::json table = nlohmann::json::array();
    for (const PhaseRow& row : scan.rows) {
        table.push_back({
            {"clauses", row.clause_count},
            {"instances", row.instances},
            {"fraction_unsat", row.fraction_unsat},
            {"fraction_usa", row.fraction_usa},
        });
    }
    return {
        {"sweep", "phase"},
        {"n", n},
        {"m_min", m_min},
        {"m_max", m_max},
        {"config", config_json(cfg)},
        {"table", table},
        {"records", records_json(scan.records, false)},
    };
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidParameterError("cannot open output file: " + path);
    out << contents;
}

}  // namespace aqc
