#include "aqc/instance.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "aqc/errors.hpp"

namespace aqc {

namespace {

void check_bit_count(int n) {
    if (n < 1 || n > kMaxBits) {
        throw CapacityError("bit count must be in [1, " + std::to_string(kMaxBits) +
                            "], got " + std::to_string(n));
    }
}

std::int64_t triple_count(int n) {
    return static_cast<std::int64_t>(n) * (n - 1) * (n - 2) / 6;
}

// Uniform unordered triple of distinct bits.
Clause draw_clause(int n, Rng& rng) {
    int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int b = a;
    while (b == a) b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int c = a;
    while (c == a || c == b) c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    return make_clause(a, b, c);
}

bool contains_clause(const std::vector<Clause>& clauses, const Clause& c) {
    return std::find(clauses.begin(), clauses.end(), c) != clauses.end();
}

}  // namespace

Clause make_clause(int a, int b, int c) {
    if (a == b || a == c || b == c) {
        throw InvalidInstanceError("clause indices must be distinct, got (" +
                                   std::to_string(a) + "," + std::to_string(b) + "," +
                                   std::to_string(c) + ")");
    }
    Clause cl{a, b, c};
    if (cl.i > cl.j) std::swap(cl.i, cl.j);
    if (cl.j > cl.k) std::swap(cl.j, cl.k);
    if (cl.i > cl.j) std::swap(cl.i, cl.j);
    return cl;
}

ExactCoverInstance::ExactCoverInstance(int n, std::vector<Clause> clauses)
    : n_(n), clauses_(std::move(clauses)) {
    check_bit_count(n_);
    for (std::size_t idx = 0; idx < clauses_.size(); ++idx) {
        const Clause& c = clauses_[idx];
        if (!(0 <= c.i && c.i < c.j && c.j < c.k && c.k < n_)) {
            throw InvalidInstanceError(
                "clause " + std::to_string(idx) + " = (" + std::to_string(c.i) + "," +
                std::to_string(c.j) + "," + std::to_string(c.k) +
                ") is not ascending with distinct indices below n=" + std::to_string(n_));
        }
        for (std::size_t prev = 0; prev < idx; ++prev) {
            if (clauses_[prev] == c) {
                throw InvalidInstanceError("clause " + std::to_string(idx) +
                                           " duplicates clause " + std::to_string(prev));
            }
        }
    }
}

int clause_cost(const Clause& c, Assignment a) {
    const int sum = static_cast<int>((a >> c.i) & 1u) + static_cast<int>((a >> c.j) & 1u) +
                    static_cast<int>((a >> c.k) & 1u);
    return sum == 1 ? 0 : 1;
}

int violation_count(const ExactCoverInstance& inst, Assignment a) {
    int violations = 0;
    for (const Clause& c : inst.clauses()) violations += clause_cost(c, a);
    return violations;
}

std::vector<Assignment> enumerate_satisfying(const ExactCoverInstance& inst) {
    const Assignment count = Assignment{1} << inst.n();
    std::vector<Assignment> satisfying;
    for (Assignment a = 0; a < count; ++a) {
        if (violation_count(inst, a) == 0) satisfying.push_back(a);
    }
    return satisfying;
}

MinimalViolationSet minimal_violation_set(const ExactCoverInstance& inst) {
    const Assignment count = Assignment{1} << inst.n();
    MinimalViolationSet result;
    result.min_violations = inst.clause_count() + 1;
    for (Assignment a = 0; a < count; ++a) {
        const int v = violation_count(inst, a);
        if (v < result.min_violations) {
            result.min_violations = v;
            result.argmin.clear();
        }
        if (v == result.min_violations) result.argmin.push_back(a);
    }
    return result;
}

ExactCoverInstance generate_gusa(int n, Rng& rng, const GusaOptions& opts) {
    check_bit_count(n);
    if (n < 3) throw InvalidParameterError("GUSA generation needs n >= 3");

    std::vector<Clause> clauses;
    std::vector<Assignment> surviving;   // satisfying set of the clause prefix
    const Assignment count = Assignment{1} << n;

    for (int restart = 0; restart < opts.retry_limit; ++restart) {
        clauses.clear();
        surviving.resize(count);
        std::iota(surviving.begin(), surviving.end(), Assignment{0});

        while (static_cast<std::int64_t>(clauses.size()) < triple_count(n)) {
            Clause c = draw_clause(n, rng);
            if (contains_clause(clauses, c)) continue;  // redraw, not an addition
            clauses.push_back(c);
            std::erase_if(surviving, [&](Assignment a) { return clause_cost(c, a) != 0; });
            if (surviving.size() == 1) return ExactCoverInstance(n, std::move(clauses));
            if (surviving.empty()) break;  // overshot: reject and start again
        }
    }
    throw GenerationError("GUSA generation exhausted " + std::to_string(opts.retry_limit) +
                          " restarts at n=" + std::to_string(n));
}

ExactCoverInstance generate_fixed_clauses(int n, int m, Rng& rng) {
    check_bit_count(n);
    if (n < 3) throw InvalidParameterError("clause generation needs n >= 3");
    if (m < 0 || m > triple_count(n)) {
        throw InvalidParameterError("clause count " + std::to_string(m) +
                                    " outside [0, C(n,3)] = [0, " +
                                    std::to_string(triple_count(n)) + "] for n=" +
                                    std::to_string(n));
    }
    std::vector<Clause> clauses;
    clauses.reserve(static_cast<std::size_t>(m));
    while (static_cast<int>(clauses.size()) < m) {
        Clause c = draw_clause(n, rng);
        if (!contains_clause(clauses, c)) clauses.push_back(c);
    }
    return ExactCoverInstance(n, std::move(clauses));
}

ExactCoverInstance read_instance_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInstanceError(std::string("instance file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("clauses")) {
        throw InvalidInstanceError("instance file must be an object with \"n\" and \"clauses\"");
    }
    if (!doc["n"].is_number_integer()) {
        throw InvalidInstanceError("\"n\" must be an integer");
    }
    const int n = doc["n"].get<int>();
    check_bit_count(n);
    if (!doc["clauses"].is_array()) {
        throw InvalidInstanceError("\"clauses\" must be an array of triples");
    }

    std::vector<Clause> clauses;
    std::size_t idx = 0;
    for (const auto& entry : doc["clauses"]) {
        const std::string where = "clause " + std::to_string(idx);
        if (!entry.is_array() || entry.size() != 3) {
            throw InvalidInstanceError(where + " is not a triple");
        }
        for (const auto& v : entry) {
            if (!v.is_number_integer()) {
                throw InvalidInstanceError(where + " has a non-integer index");
            }
        }
        const int i = entry[0].get<int>();
        const int j = entry[1].get<int>();
        const int k = entry[2].get<int>();
        if (!(0 <= i && i < j && j < k && k < n)) {
            throw InvalidInstanceError(where + " = [" + std::to_string(i) + "," +
                                       std::to_string(j) + "," + std::to_string(k) +
                                       "] must be strictly ascending indices below n=" +
                                       std::to_string(n));
        }
        clauses.push_back(Clause{i, j, k});
        ++idx;
    }
    // Constructor re-checks everything, including duplicates.
    return ExactCoverInstance(n, std::move(clauses));
}

ExactCoverInstance read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInstanceError("cannot open instance file: " + path);
    return read_instance_json(in);
}

void write_instance_json(std::ostream& out, const ExactCoverInstance& inst) {
    nlohmann::ordered_json doc;
    doc["n"] = inst.n();
    auto& arr = doc["clauses"] = nlohmann::ordered_json::array();
    for (const Clause& c : inst.clauses()) arr.push_back({c.i, c.j, c.k});
    out << doc.dump() << '\n';
}

void write_instance_file(const std::string& path, const ExactCoverInstance& inst) {
    std::ofstream out(path);
    if (!out) throw InvalidInstanceError("cannot open output file: " + path);
    write_instance_json(out, inst);
}

}  // namespace aqc
