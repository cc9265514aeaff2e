#ifndef AQC_INSTANCE_HPP
#define AQC_INSTANCE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aqc/rng.hpp"

namespace aqc {

// Bit assignments are encoded little-endian: bit i of the integer is z_i.
// State-vector indices and file formats use the same encoding.
using Assignment = std::uint32_t;

// Largest supported bit count for exhaustive enumeration and state vectors.
inline constexpr int kMaxBits = 24;

// One Exact Cover constraint on bits (i, j, k): z_i + z_j + z_k = 1.
// Stored in canonical ascending order with distinct indices.
struct Clause {
    int i = 0;
    int j = 0;
    int k = 0;

    friend bool operator==(const Clause&, const Clause&) = default;
};

// Builds the canonical form from indices in any order; rejects repeats.
Clause make_clause(int a, int b, int c);

// An n-bit Exact Cover instance: an ordered clause list over bits [0, n).
// Immutable after construction; the constructor enforces every invariant
// (canonical clauses, valid indices, no duplicate clauses as index sets).
class ExactCoverInstance {
public:
    ExactCoverInstance(int n, std::vector<Clause> clauses);

    int n() const { return n_; }
    const std::vector<Clause>& clauses() const { return clauses_; }
    int clause_count() const { return static_cast<int>(clauses_.size()); }

    friend bool operator==(const ExactCoverInstance&, const ExactCoverInstance&) = default;

private:
    int n_;
    std::vector<Clause> clauses_;
};

// 0 when exactly one of z_i, z_j, z_k is set, 1 otherwise.
int clause_cost(const Clause& c, Assignment a);

// Number of clauses the assignment violates; 0 iff it satisfies the instance.
int violation_count(const ExactCoverInstance& inst, Assignment a);

// All satisfying assignments in ascending integer order (exhaustive scan).
std::vector<Assignment> enumerate_satisfying(const ExactCoverInstance& inst);

// Minimum violation count over all 2^n assignments and every assignment
// attaining it, ascending.  min_violations == 0 iff the instance is
// satisfiable, in which case argmin equals enumerate_satisfying.
struct MinimalViolationSet {
    int min_violations = 0;
    std::vector<Assignment> argmin;
};
MinimalViolationSet minimal_violation_set(const ExactCoverInstance& inst);

// Incremental-clause generator for instances with a unique satisfying
// assignment: add uniformly random distinct triples one at a time, tracking
// the surviving satisfying set; stop when it shrinks to exactly one, restart
// from scratch when it hits zero.  Duplicate triples are redrawn without
// counting as clause additions.
struct GusaOptions {
    int retry_limit = 10000;  // whole-instance restarts before giving up
};
ExactCoverInstance generate_gusa(int n, Rng& rng, const GusaOptions& opts = {});

// m distinct uniformly random clauses; duplicates (as index sets) redrawn.
ExactCoverInstance generate_fixed_clauses(int n, int m, Rng& rng);

// Instance files: {"n": 6, "clauses": [[0,1,2],[1,3,5]]}, triples ascending,
// clause list in generation order.  The reader names the offending clause in
// its diagnostic.
ExactCoverInstance read_instance_json(std::istream& in);
ExactCoverInstance read_instance_file(const std::string& path);
void write_instance_json(std::ostream& out, const ExactCoverInstance& inst);
void write_instance_file(const std::string& path, const ExactCoverInstance& inst);

}  // namespace aqc

#endif
