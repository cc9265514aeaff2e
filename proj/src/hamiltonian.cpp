#include "aqc/hamiltonian.hpp"

#include <Eigen/Eigenvalues>

#include "aqc/errors.hpp"

namespace aqc {

HamiltonianData build_hamiltonian(const ExactCoverInstance& inst) {
    HamiltonianData hd;
    hd.n = inst.n();
    const Eigen::Index dim = Eigen::Index{1} << hd.n;
    hd.cost.resize(dim);
    for (Assignment a = 0; a < static_cast<Assignment>(dim); ++a) {
        hd.cost[static_cast<Eigen::Index>(a)] = violation_count(inst, a);
    }
    hd.field = Eigen::VectorXd::Zero(hd.n);
    for (const Clause& c : inst.clauses()) {
        hd.field[c.i] += 1.0;
        hd.field[c.j] += 1.0;
        hd.field[c.k] += 1.0;
    }
    return hd;
}

void apply_h_of_t(const HamiltonianData& hd, double s, const Eigen::VectorXcd& x,
                  Eigen::VectorXcd& out) {
    const Eigen::Index dim = hd.dim();
    if (x.size() != dim) {
        throw InvalidParameterError("state has " + std::to_string(x.size()) +
                                    " amplitudes, Hamiltonian expects " +
                                    std::to_string(dim));
    }
    out.resize(dim);

    // Diagonal part: s*cost[z] plus the constant (1-s) * sum_i d_i / 2 from H_B.
    const double diag_shift = 0.5 * (1.0 - s) * hd.field_sum();
    const double* cost = hd.cost.data();
    const std::complex<double>* in = x.data();
    std::complex<double>* o = out.data();
    for (Eigen::Index z = 0; z < dim; ++z) {
        o[z] = (s * cost[z] + diag_shift) * in[z];
    }

    // Off-diagonal part of H_B: -(1-s) * d_i/2 between z and z with bit i flipped.
    for (int bit = 0; bit < hd.n; ++bit) {
        const double w = 0.5 * (1.0 - s) * hd.field[bit];
        if (w == 0.0) continue;
        const std::size_t half = std::size_t{1} << bit;
        for (std::size_t base = 0; base < static_cast<std::size_t>(dim); base += 2 * half) {
            for (std::size_t off = 0; off < half; ++off) {
                const std::size_t z0 = base + off;
                const std::size_t z1 = z0 + half;
                o[z0] -= w * in[z1];
                o[z1] -= w * in[z0];
            }
        }
    }
}

Eigen::VectorXcd apply_h_of_t(const HamiltonianData& hd, double s,
                              const Eigen::VectorXcd& x) {
    Eigen::VectorXcd out;
    apply_h_of_t(hd, s, x, out);
    return out;
}

Eigen::MatrixXd dense_matrix(const HamiltonianData& hd, double s) {
    if (hd.n > kMaxDenseBits) {
        throw CapacityError("dense oracle limited to n <= " +
                            std::to_string(kMaxDenseBits) + ", got n=" +
                            std::to_string(hd.n));
    }
    const Eigen::Index dim = hd.dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double diag_shift = 0.5 * (1.0 - s) * hd.field_sum();
    for (Eigen::Index z = 0; z < dim; ++z) {
        h(z, z) = s * hd.cost[z] + diag_shift;
        for (int bit = 0; bit < hd.n; ++bit) {
            const Eigen::Index flipped = z ^ (Eigen::Index{1} << bit);
            h(z, flipped) -= 0.5 * (1.0 - s) * hd.field[bit];
        }
    }
    return h;
}

LowSpectrum low_spectrum(const HamiltonianData& hd, double s, int k) {
    const Eigen::Index dim = hd.dim();
    if (k < 1 || k > dim) {
        throw InvalidParameterError("eigenpair count must be in [1, 2^n]");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_matrix(hd, s));
    if (solver.info() != Eigen::Success) {
        throw Error("eigensolver failed to converge");
    }
    LowSpectrum low;
    low.values = solver.eigenvalues().head(k);
    low.vectors = solver.eigenvectors().leftCols(k);
    return low;
}

}  // namespace aqc
