#include "aqc/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <string>

#include <json.hpp>

#include "aqc/errors.hpp"

namespace aqc {

namespace {

void validate_config(const EvolutionConfig& cfg) {
    if (!(cfg.total_time >= 0.0)) throw InvalidParameterError("run time T must be >= 0");
    if (!(cfg.norm_tolerance > 0.0) || !(cfg.oracle_tolerance > 0.0)) {
        throw InvalidParameterError("tolerances must be > 0");
    }
    if (cfg.dt < 0.0) throw InvalidParameterError("dt must be >= 0");
    if (cfg.step_halvings < 0 || cfg.step_halvings > 40) {
        throw InvalidParameterError("step_halvings must be in [0, 40]");
    }
}

double resolve_dt(const HamiltonianData& hd, const EvolutionConfig& cfg) {
    double base = cfg.dt;
    if (base == 0.0) {
        const double bound = hd.energy_bound();
        base = bound > 0.0 ? std::min(0.01, 1.0 / (4.0 * bound)) : 0.01;
    }
    return std::ldexp(base, -cfg.step_halvings);
}

// One fixed-step RK4 pass over [0, T].  Does not check the norm contract.
StateVector integrate(const HamiltonianData& hd, const EvolutionConfig& cfg,
                      const StateVector& psi0, EvolveStats& stats) {
    const double total = cfg.total_time;
    StateVector y = psi0;
    if (total == 0.0) {
        stats = EvolveStats{0, 0.0, std::abs(y.norm() - 1.0)};
        return y;
    }

    const double dt_target = resolve_dt(hd, cfg);
    const auto steps = static_cast<std::int64_t>(std::ceil(total / dt_target));
    const double dt = total / static_cast<double>(steps);
    const std::complex<double> sixth(0.0, -dt / 6.0);
    const std::complex<double> third(0.0, -dt / 3.0);
    const std::complex<double> half(0.0, -dt / 2.0);
    const std::complex<double> whole(0.0, -dt);

    StateVector k(y.size()), acc(y.size()), tmp(y.size());
    for (std::int64_t step = 0; step < steps; ++step) {
        const double t0 = static_cast<double>(step) * dt;
        const double s0 = t0 / total;
        const double s_mid = (t0 + 0.5 * dt) / total;
        const double s1 = (t0 + dt) / total;

        apply_h_of_t(hd, s0, y, k);
        acc = y + sixth * k;
        tmp = y + half * k;
        apply_h_of_t(hd, s_mid, tmp, k);
        acc += third * k;
        tmp = y + half * k;
        apply_h_of_t(hd, s_mid, tmp, k);
        acc += third * k;
        tmp = y + whole * k;
        apply_h_of_t(hd, s1, tmp, k);
        y = acc + sixth * k;
    }

    stats = EvolveStats{steps, dt, std::abs(y.norm() - 1.0)};
    return y;
}

StateVector evolve_checked(const HamiltonianData& hd, const EvolutionConfig& cfg,
                           const StateVector& psi0, EvolveStats* stats_out) {
    validate_config(cfg);
    if (psi0.size() != hd.dim()) {
        throw InvalidParameterError("start state has " + std::to_string(psi0.size()) +
                                    " amplitudes, Hamiltonian expects " +
                                    std::to_string(hd.dim()));
    }
    EvolveStats stats;
    StateVector psi = integrate(hd, cfg, psi0, stats);
    if (stats_out) *stats_out = stats;
    if (stats.norm_drift > cfg.norm_tolerance) {
        throw IntegrationAccuracyError(
            "norm drift " + std::to_string(stats.norm_drift) + " exceeds tolerance " +
                std::to_string(cfg.norm_tolerance) + " after " +
                std::to_string(stats.steps) + " steps of dt=" + std::to_string(stats.dt),
            stats.norm_drift, stats.steps, stats.dt);
    }
    return psi;
}

}  // namespace

StateVector initial_state(int n) {
    if (n < 1 || n > kMaxBits) {
        throw CapacityError("bit count must be in [1, " + std::to_string(kMaxBits) + "]");
    }
    const Eigen::Index dim = Eigen::Index{1} << n;
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    return StateVector::Constant(dim, std::complex<double>(amp, 0.0));
}

StateVector evolve(const HamiltonianData& hd, const EvolutionConfig& cfg,
                   EvolveStats* stats) {
    return evolve_checked(hd, cfg, initial_state(hd.n), stats);
}

StateVector evolve_state(const HamiltonianData& hd, const EvolutionConfig& cfg,
                         const StateVector& psi0, EvolveStats* stats) {
    return evolve_checked(hd, cfg, psi0, stats);
}

int calibrate_step_halvings(const HamiltonianData& hd, const EvolutionConfig& cfg,
                            int max_halvings) {
    validate_config(cfg);
    EvolutionConfig probe = cfg;
    probe.step_halvings = cfg.step_halvings;
    EvolveStats stats;
    StateVector coarse = integrate(hd, probe, initial_state(hd.n), stats);
    double drift = stats.norm_drift;

    while (probe.step_halvings < max_halvings) {
        EvolutionConfig finer = probe;
        finer.step_halvings = probe.step_halvings + 1;
        StateVector fine = integrate(hd, finer, initial_state(hd.n), stats);
        if (drift <= cfg.norm_tolerance && (coarse - fine).norm() <= cfg.oracle_tolerance) {
            return probe.step_halvings;
        }
        coarse = std::move(fine);
        drift = stats.norm_drift;
        probe.step_halvings = finer.step_halvings;
    }
    throw IntegrationAccuracyError(
        "convergence self-check failed after " + std::to_string(max_halvings) +
            " step halvings at T=" + std::to_string(cfg.total_time),
        drift, stats.steps, stats.dt);
}

double success_probability(const StateVector& psi, std::span<const Assignment> targets) {
    if (targets.empty()) {
        throw InvalidParameterError("success probability needs a nonempty target set");
    }
    double p = 0.0;
    for (Assignment a : targets) {
        if (static_cast<Eigen::Index>(a) >= psi.size()) {
            throw InvalidParameterError("target assignment " + std::to_string(a) +
                                        " outside state of size " +
                                        std::to_string(psi.size()));
        }
        p += std::norm(psi[static_cast<Eigen::Index>(a)]);
    }
    return p;
}

double amplified_success(double p, int repetitions) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameterError("probability outside [0, 1]");
    if (repetitions < 1) throw InvalidParameterError("repetition count must be >= 1");
    return 1.0 - std::pow(1.0 - p, repetitions);
}

void write_state_json(std::ostream& out, const StateVector& psi) {
    if (psi.size() > (Eigen::Index{1} << kMaxDenseBits)) {
        throw CapacityError("state dumps limited to n <= " + std::to_string(kMaxDenseBits));
    }
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index z = 0; z < psi.size(); ++z) {
        arr.push_back({psi[z].real(), psi[z].imag()});
    }
    out << arr.dump() << '\n';
}

StateVector read_state_json(std::istream& in) {
    nlohmann::json arr = nlohmann::json::parse(in);
    if (!arr.is_array()) throw InvalidParameterError("state dump must be a JSON array");
    StateVector psi(arr.size());
    Eigen::Index z = 0;
    for (const auto& pair : arr) {
        if (!pair.is_array() || pair.size() != 2) {
            throw InvalidParameterError("state dump entries must be [re, im] pairs");
        }
        psi[z++] = std::complex<double>(pair[0].get<double>(), pair[1].get<double>());
    }
    return psi;
}

}  // namespace aqc
