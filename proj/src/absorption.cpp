#include "floorline/absorption.hpp"
#include "floorline/parallel.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace floorline {

ClassifyResult classify_set(const SparseParityCheck& h, const std::vector<int>& variables) {
    ClassifyResult res;
    if (variables.empty()) {
        res.reason = "empty variable set";
        return res;
    }
    std::vector<int> vars = variables;
    std::sort(vars.begin(), vars.end());
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
        res.reason = "duplicate variable index";
        return res;
    }
    for (int v : vars)
        if (v < 0 || static_cast<std::size_t>(v) >= h.cols()) {
            res.reason = "variable index out of range";
            return res;
        }

    std::map<int, int> incidence;
    for (int v : vars)
        for (int c : h.col(v)) ++incidence[c];

    for (int v : vars) {
        int odd = 0, even = 0;
        for (int c : h.col(v))
            (incidence[c] & 1) ? ++odd : ++even;
        if (even <= odd) {
            res.reason = "variable " + std::to_string(v) + " fails the even-check majority";
            return res;
        }
    }
    res.accepted = true;
    res.set.variables = std::move(vars);
    for (auto [c, cnt] : incidence)
        ((cnt & 1) ? res.set.unsatisfied_checks : res.set.satisfied_checks).push_back(c);
    return res;
}

int SetTopology::b() const {
    int sum = 0;
    for (int d : ext_degree) sum += d;
    return sum;
}

SetTopology make_topology(int num_vars, const std::vector<std::pair<int, int>>& internal_checks,
                          const std::vector<int>& ext_degree) {
    if (static_cast<int>(ext_degree.size()) != num_vars)
        throw std::invalid_argument("ext_degree size must equal the variable count");
    SetTopology topo;
    topo.num_vars = num_vars;
    topo.internal_checks = internal_checks;
    topo.ext_degree = ext_degree;
    std::vector<std::vector<int>> per_var(num_vars);
    for (std::size_t ci = 0; ci < internal_checks.size(); ++ci) {
        auto [u, v] = internal_checks[ci];
        if (u < 0 || u >= num_vars || v < 0 || v >= num_vars || u == v)
            throw std::invalid_argument("invalid internal check pair");
        per_var[u].push_back(static_cast<int>(ci));
        per_var[v].push_back(static_cast<int>(ci));
    }
    for (int v = 0; v < num_vars; ++v)
        for (int ci : per_var[v]) topo.edges.emplace_back(v, ci);
    return topo;
}

SetTopology induced_topology(const SparseParityCheck& h, const AbsorptionSet& set) {
    std::map<int, int> local;  // original variable -> 0..a-1
    for (std::size_t i = 0; i < set.variables.size(); ++i)
        local[set.variables[i]] = static_cast<int>(i);

    std::map<int, std::vector<int>> check_members;  // original check -> local vars
    for (int v : set.variables)
        for (int c : h.col(v)) check_members[c].push_back(local[v]);

    std::vector<std::pair<int, int>> internal;
    std::vector<int> ext(set.variables.size(), 0);
    for (auto& [c, members] : check_members) {
        if (members.size() & 1) {
            if (members.size() != 1)
                throw std::invalid_argument("set has an odd check of incidence " +
                                            std::to_string(members.size()) +
                                            "; the linear model expects incidence-1 unsatisfied checks");
            ++ext[members[0]];
        } else {
            if (members.size() != 2)
                throw std::invalid_argument("set has a satisfied check of incidence " +
                                            std::to_string(members.size()) +
                                            "; the linear model requires incidence exactly 2");
            internal.emplace_back(members[0], members[1]);
        }
    }
    // check_members iterates in ascending original check index, fixing the
    // within-variable edge order deterministically
    return make_topology(static_cast<int>(set.variables.size()), internal, ext);
}

namespace {

struct SearchContext {
    const SparseParityCheck* h;
    EnumerationOptions opt;
    int max_col_degree;
};

// DFS over ascending variable indices. incidence[] counts how many chosen
// variables touch each check; odd_count is the number of odd-incidence checks.
// Prune: adding one variable changes the odd count by at least -deg(v), so a
// partial set with odd_count > b_max + max_deg * (a_max - t) cannot complete.
// Returns true when the caller-supplied quota was hit and the walk aborted.
bool search(const SearchContext& ctx, std::vector<int>& chosen, std::vector<std::uint8_t>& incidence,
            int odd_count, int next_var, std::vector<AbsorptionSet>& found, std::size_t quota) {
    const auto& h = *ctx.h;
    const int t = static_cast<int>(chosen.size());
    if (t >= 1 && odd_count <= ctx.opt.b_max) {
        // full majority test only when the cheap b bound already holds
        bool ok = true;
        for (int v : chosen) {
            int odd = 0, even = 0;
            for (int c : h.col(v)) (incidence[c] & 1) ? ++odd : ++even;
            if (even <= odd) { ok = false; break; }
        }
        if (ok) {
            AbsorptionSet s;
            s.variables = chosen;
            for (std::size_t c = 0; c < h.rows(); ++c) {
                if (!incidence[c]) continue;
                ((incidence[c] & 1) ? s.unsatisfied_checks : s.satisfied_checks).push_back(static_cast<int>(c));
            }
            found.push_back(std::move(s));
            if (quota && found.size() >= quota) return true;
        }
    }
    if (t == ctx.opt.a_max) return false;
    const int budget = ctx.opt.b_max + ctx.max_col_degree * (ctx.opt.a_max - t - 1);
    for (int v = next_var; v < static_cast<int>(h.cols()); ++v) {
        int new_odd = odd_count;
        for (int c : h.col(v)) new_odd += (incidence[c] & 1) ? -1 : 1;
        if (new_odd > budget) continue;
        for (int c : h.col(v)) ++incidence[c];
        chosen.push_back(v);
        bool stop = search(ctx, chosen, incidence, new_odd, v + 1, found, quota);
        chosen.pop_back();
        for (int c : h.col(v)) --incidence[c];
        if (stop) return true;
    }
    return false;
}

std::vector<int> rotate_set(const std::vector<int>& vars, std::size_t p, std::size_t k) {
    std::vector<int> out;
    out.reserve(vars.size());
    for (int v : vars) {
        std::size_t block = static_cast<std::size_t>(v) / p;
        std::size_t off = (static_cast<std::size_t>(v) + k) % p;
        out.push_back(static_cast<int>(block * p + off));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> canonical_form(const std::vector<int>& vars, std::size_t p) {
    std::vector<int> best = rotate_set(vars, p, 0);
    for (std::size_t k = 1; k < p; ++k) {
        auto cand = rotate_set(vars, p, k);
        if (cand < best) best = cand;
    }
    return best;
}

} // namespace

SetCensus enumerate_sets(const SparseParityCheck& h, const EnumerationOptions& opt) {
    if (opt.a_max < 1) throw std::invalid_argument("a_max must be >= 1");
    SearchContext ctx{&h, opt, 0};
    for (std::size_t c = 0; c < h.cols(); ++c)
        ctx.max_col_degree = std::max(ctx.max_col_degree, static_cast<int>(h.col(c).size()));

    const std::size_t p = opt.qc_p;
    if (p > 0) {
        if (h.cols() % p != 0 || h.rows() % p != 0)
            throw std::invalid_argument("qc_p does not divide the matrix dimensions");
        if (opt.a_max >= static_cast<int>(p))
            throw std::invalid_argument("qc symmetry reduction requires a_max < p");
    }

    // first-variable roots; under QC symmetry every orbit has a member whose
    // minimum variable sits at offset 0 of its block
    std::vector<int> roots;
    for (int v = 0; v < static_cast<int>(h.cols()); ++v)
        if (p == 0 || static_cast<std::size_t>(v) % p == 0) roots.push_back(v);

    std::vector<std::vector<AbsorptionSet>> partial;
    bool aborted = false;

    if (opt.stop_after > 0) {
        // early-stop mode runs serially so the quota is honored deterministically
        partial.resize(1);
        for (int root : roots) {
            std::vector<std::uint8_t> incidence(h.rows(), 0);
            std::vector<int> chosen{root};
            int odd = 0;
            for (int c : h.col(root)) { ++incidence[c]; ++odd; }
            if (search(ctx, chosen, incidence, odd, root + 1, partial[0], opt.stop_after)) {
                aborted = true;
                break;
            }
        }
    } else {
        // two-level prefixes for balanced parallel work: the singleton itself,
        // plus every (root, second) continuation
        struct Prefix { int root; int second; };  // second < 0: record root alone
        std::vector<Prefix> prefixes;
        for (int root : roots) {
            prefixes.push_back({root, -1});
            for (int v2 = root + 1; v2 < static_cast<int>(h.cols()); ++v2)
                prefixes.push_back({root, v2});
        }
        partial.resize(prefixes.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 32) num_threads(worker_count())
#endif
        for (long pi = 0; pi < static_cast<long>(prefixes.size()); ++pi) {
            const auto [root, second] = prefixes[pi];
            std::vector<std::uint8_t> incidence(h.rows(), 0);
            std::vector<int> chosen{root};
            int odd = 0;
            for (int c : h.col(root)) { ++incidence[c]; ++odd; }
            if (second < 0) {
                // record the singleton if it qualifies (it cannot: all checks odd),
                // kept for uniformity with the recursive bookkeeping
                SearchContext leaf = ctx;
                leaf.opt.a_max = 1;
                search(leaf, chosen, incidence, odd, static_cast<int>(h.cols()), partial[pi], 0);
            } else {
                if (ctx.opt.a_max < 2) continue;
                for (int c : h.col(second)) odd += (incidence[c] & 1) ? -1 : 1;
                for (int c : h.col(second)) ++incidence[c];
                chosen.push_back(second);
                search(ctx, chosen, incidence, odd, second + 1, partial[pi], 0);
            }
        }
    }

    SetCensus census;
    census.exhaustive = !aborted;
    if (p == 0) {
        for (auto& bucket : partial)
            for (auto& s : bucket)
                census.by_signature[{s.a(), s.b()}].push_back(std::move(s));
    } else {
        // dedupe orbit representatives, then expand each orbit; the rotation
        // set handles orbits shorter than p (possible for composite p)
        std::set<std::vector<int>> seen;
        for (auto& bucket : partial) {
            for (auto& s : bucket) {
                auto canon = canonical_form(s.variables, p);
                if (!seen.insert(canon).second) continue;
                std::set<std::vector<int>> orbit;
                for (std::size_t k = 0; k < p; ++k) orbit.insert(rotate_set(canon, p, k));
                for (const auto& member : orbit) {
                    auto res = classify_set(h, member);
                    if (!res.accepted)
                        throw std::logic_error("QC orbit member failed re-classification");
                    census.by_signature[{res.set.a(), res.set.b()}].push_back(std::move(res.set));
                }
            }
        }
    }
    for (auto& [sig, sets] : census.by_signature)
        std::sort(sets.begin(), sets.end(),
                  [](const AbsorptionSet& x, const AbsorptionSet& y) { return x.variables < y.variables; });
    return census;
}

double containment_fraction(const std::vector<AbsorptionSet>& smaller,
                            const std::vector<AbsorptionSet>& larger) {
    if (smaller.empty()) return 1.0;
    std::size_t contained = 0;
    for (const auto& s : smaller) {
        bool hit = false;
        for (const auto& l : larger) {
            if (std::includes(l.variables.begin(), l.variables.end(),
                              s.variables.begin(), s.variables.end())) {
                hit = true;
                break;
            }
        }
        if (hit) ++contained;
    }
    return static_cast<double>(contained) / static_cast<double>(smaller.size());
}

} // namespace floorline
