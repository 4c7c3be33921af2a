#ifndef FLOORLINE_ABSORPTION_HPP
#define FLOORLINE_ABSORPTION_HPP

#include "floorline/parity_check.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace floorline {

struct AbsorptionSet {
    std::vector<int> variables;           // sorted
    std::vector<int> unsatisfied_checks;  // odd incidence
    std::vector<int> satisfied_checks;    // even incidence >= 2
    int a() const { return static_cast<int>(variables.size()); }
    int b() const { return static_cast<int>(unsatisfied_checks.size()); }
};

struct ClassifyResult {
    bool accepted = false;
    AbsorptionSet set;
    std::string reason;  // why rejected, empty when accepted
};

// Definition-1 test: every variable in the set must have strictly more
// even-incidence neighbor checks than odd-incidence ones.
ClassifyResult classify_set(const SparseParityCheck& h, const std::vector<int>& variables);

// Induced topology of a set whose satisfied checks all have incidence
// exactly 2. Variables are relabeled 0..a-1 ascending; internal edges are
// labeled variable-major, within a variable by ascending check index.
struct SetTopology {
    int num_vars = 0;
    std::vector<std::pair<int, int>> internal_checks;  // local variable pairs
    std::vector<int> ext_degree;                       // unsatisfied checks per local variable
    std::vector<std::pair<int, int>> edges;            // (local var, internal check index)

    int num_edges() const { return static_cast<int>(edges.size()); }
    int b() const;
};

SetTopology induced_topology(const SparseParityCheck& h, const AbsorptionSet& set);

// Topology straight from an abstract description (used for fixtures).
SetTopology make_topology(int num_vars, const std::vector<std::pair<int, int>>& internal_checks,
                          const std::vector<int>& ext_degree);

struct EnumerationOptions {
    int a_max = 8;
    int b_max = 8;
    std::size_t qc_p = 0;        // exploit the cyclic QC automorphism of order p when > 0
    std::size_t stop_after = 0;  // stop once this many sets are recorded (0 = exhaustive)
};

struct SetCensus {
    std::map<std::pair<int, int>, std::vector<AbsorptionSet>> by_signature;
    bool exhaustive = true;

    std::size_t multiplicity(int a, int b) const {
        auto it = by_signature.find({a, b});
        return it == by_signature.end() ? 0 : it->second.size();
    }
};

// Exhaustive enumeration of absorption sets with a <= a_max, b <= b_max.
// Depth-first over ascending variable indices, pruned by the bound that one
// added variable lowers the odd-check count by at most its degree. With
// qc_p set, only orbit representatives are searched and each orbit is
// expanded, which requires h to be a p-circulant QC matrix.
SetCensus enumerate_sets(const SparseParityCheck& h, const EnumerationOptions& opt);

// Fraction of the smaller sets whose variables are a subset of some larger set.
double containment_fraction(const std::vector<AbsorptionSet>& smaller,
                            const std::vector<AbsorptionSet>& larger);

} // namespace floorline

#endif
