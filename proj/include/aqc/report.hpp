#ifndef AQC_REPORT_HPP
#define AQC_REPORT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqc/experiments.hpp"

namespace aqc {

// Shortest round-trip decimal form; keeps emitted files byte-stable.
std::string format_double(double value);

// One row per EnsembleRecord: seed,n,clauses,satisfiable,num_sat,T,prob,flag
std::string records_csv(const std::vector<EnsembleRecord>& records);
void write_records_csv(std::ostream& out, const std::vector<EnsembleRecord>& records);

nlohmann::json config_json(const SweepConfig& cfg);
nlohmann::json fit_json(const QuadraticFit& fit);
QuadraticFit fit_from_json(const nlohmann::json& doc);
QuadraticFit read_fit_file(const std::string& path);
void write_fit_file(const std::string& path, const QuadraticFit& fit);

nlohmann::json median_time_summary(const MedianTimeSweepResult& sweep, const SweepConfig& cfg,
                                   int n_min, int n_max);
nlohmann::json fixed_time_summary(const FixedTimeSweepResult& sweep, const SweepConfig& cfg,
                                  const QuadraticFit& fit, int n_min, int n_max);
nlohmann::json clause_sweep_summary(const ClauseSweepResult& sweep, const SweepConfig& cfg,
                                    const QuadraticFit& fit, int n, int m_min, int m_max);
nlohmann::json phase_scan_summary(const PhaseScanResult& scan, const SweepConfig& cfg, int n,
                                  int m_min, int m_max);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace aqc

#endif
