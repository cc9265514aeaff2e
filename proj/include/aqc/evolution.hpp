#ifndef AQC_EVOLUTION_HPP
#define AQC_EVOLUTION_HPP

#include <cstdint>
#include <iosfwd>
#include <span>

#include <Eigen/Core>

#include "aqc/hamiltonian.hpp"
#include "aqc/instance.hpp"

namespace aqc {

// State vectors are plain Eigen vectors of 2^n complex amplitudes; index z
// is the assignment z in the little-endian encoding of aqc::Assignment.
using StateVector = Eigen::VectorXcd;

// Integration contract for a single Schrödinger run.  The integrator is a
// fixed-step classical RK4 on i dpsi/dt = H(t) psi.  The state is never
// renormalized: norm drift is the accuracy diagnostic, and a run whose final
// drift exceeds norm_tolerance fails with IntegrationAccuracyError.
struct EvolutionConfig {
    double total_time = 0.0;      // T, dimensionless (hbar = 1)
    double dt = 0.0;              // base step; 0 selects min(0.01, 1/(4 E_max))
    int step_halvings = 0;        // extra halvings from convergence self-checks
    double norm_tolerance = 1e-6;
    double oracle_tolerance = 1e-6;  // target for self-checks and test oracles
};

struct EvolveStats {
    std::int64_t steps = 0;
    double dt = 0.0;
    double norm_drift = 0.0;
};

// Uniform superposition over all 2^n assignments, the ground state of H(0).
StateVector initial_state(int n);

// Integrates from initial_state(n) at t=0 to t=T and returns psi(T).
StateVector evolve(const HamiltonianData& hd, const EvolutionConfig& cfg,
                   EvolveStats* stats = nullptr);

// Same integrator from an arbitrary start state (used by unitarity checks).
StateVector evolve_state(const HamiltonianData& hd, const EvolutionConfig& cfg,
                         const StateVector& psi0, EvolveStats* stats = nullptr);

// Smallest number of extra step halvings such that the final norm drift is
// within norm_tolerance and halving once more changes psi(T) by no more than
// oracle_tolerance in 2-norm.  Run once per ensemble as the convergence
// self-check; cfg.total_time is the reference run time.
int calibrate_step_halvings(const HamiltonianData& hd, const EvolutionConfig& cfg,
                            int max_halvings = 12);

// Squared-amplitude weight of psi on the target assignments.
double success_probability(const StateVector& psi, std::span<const Assignment> targets);

// Success probability of k independent repetitions of a p-success run.
double amplified_success(double p, int repetitions);

// Debug dump for n <= 10: JSON array of [re, im] pairs in index order.
void write_state_json(std::ostream& out, const StateVector& psi);
StateVector read_state_json(std::istream& in);

}  // namespace aqc

#endif
