#ifndef AQC_HAMILTONIAN_HPP
#define AQC_HAMILTONIAN_HPP

#include <Eigen/Core>

#include "aqc/instance.hpp"

namespace aqc {

// Precomputed data defining the interpolated Hamiltonian of an instance:
//
//   H(s) = (1 - s) * H_B + s * H_P,          s = t/T in [0, 1],
//
// with H_P diagonal (H_P|z> = cost[z]|z>, the violation count) and the
// transverse-field beginning Hamiltonian
//
//   H_B = sum_i d_i * (1 - sigma_x^(i)) / 2,
//
// where d_i counts the clauses containing bit i.  Both pieces have ground
// energy exactly 0: the uniform superposition at s=0 and the min-violation
// basis states at s=1.
struct HamiltonianData {
    int n = 0;
    Eigen::VectorXd cost;    // length 2^n, cost[z] = violation count of z
    Eigen::VectorXd field;   // length n, d_i = clauses containing bit i

    Eigen::Index dim() const { return cost.size(); }
    double field_sum() const { return field.sum(); }
    // Spectral scale used for default integrator steps.
    double energy_bound() const {
        return (cost.size() ? cost.maxCoeff() : 0.0) +
               (field.size() ? field.maxCoeff() : 0.0);
    }
};

HamiltonianData build_hamiltonian(const ExactCoverInstance& inst);

// out = H(s) x, matrix-free.  out is resized; aliasing x is not allowed.
void apply_h_of_t(const HamiltonianData& hd, double s, const Eigen::VectorXcd& x,
                  Eigen::VectorXcd& out);

Eigen::VectorXcd apply_h_of_t(const HamiltonianData& hd, double s,
                              const Eigen::VectorXcd& x);

// Dense verification oracle for small n (<= 10): the explicit real symmetric
// matrix of H(s).
inline constexpr int kMaxDenseBits = 10;
Eigen::MatrixXd dense_matrix(const HamiltonianData& hd, double s);

// k lowest eigenvalues (ascending) and orthonormal eigenvectors of H(s),
// computed from the dense oracle; n <= 10.
struct LowSpectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // one column per eigenvalue
};
LowSpectrum low_spectrum(const HamiltonianData& hd, double s, int k);

}  // namespace aqc

#endif
