#include "floorline/parity_check.hpp"
#include "floorline/parallel.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace floorline {

SparseParityCheck::SparseParityCheck(std::size_t n_rows, std::size_t n_cols,
                                     std::vector<std::vector<int>> row_support)
    : n_rows_(n_rows), n_cols_(n_cols), row_support_(std::move(row_support)) {
    if (row_support_.size() != n_rows_)
        throw std::invalid_argument("row support size does not match row count");
    col_support_.assign(n_cols_, {});
    num_edges_ = 0;
    for (std::size_t r = 0; r < n_rows_; ++r) {
        auto& row = row_support_[r];
        std::sort(row.begin(), row.end());
        for (std::size_t i = 0; i < row.size(); ++i) {
            int c = row[i];
            if (c < 0 || static_cast<std::size_t>(c) >= n_cols_)
                throw std::invalid_argument("variable index out of range in row " + std::to_string(r));
            if (i > 0 && row[i - 1] == c)
                throw std::invalid_argument("duplicate variable index in row " + std::to_string(r));
            col_support_[c].push_back(static_cast<int>(r));
            ++num_edges_;
        }
    }
    // rows were scanned in order, so column lists are already sorted
}

SparseParityCheck build_qc_matrix(const std::vector<std::vector<int>>& shifts, std::size_t p) {
    if (p == 0) throw std::invalid_argument("circulant size p must be positive");
    if (shifts.empty() || shifts[0].empty())
        throw std::invalid_argument("shift table must be non-empty");
    const std::size_t dv = shifts.size();
    const std::size_t dc = shifts[0].size();
    for (const auto& row : shifts) {
        if (row.size() != dc) throw std::invalid_argument("ragged shift table");
        for (int k : row)
            if (k < 0 || static_cast<std::size_t>(k) >= p)
                throw std::invalid_argument("shift out of range [0, p)");
    }
    std::vector<std::vector<int>> rows(dv * p);
    for (std::size_t bi = 0; bi < dv; ++bi) {
        for (std::size_t r = 0; r < p; ++r) {
            auto& row = rows[bi * p + r];
            row.reserve(dc);
            for (std::size_t bj = 0; bj < dc; ++bj) {
                std::size_t c = (r + static_cast<std::size_t>(shifts[bi][bj])) % p;
                row.push_back(static_cast<int>(bj * p + c));
            }
        }
    }
    SparseParityCheck h(dv * p, dc * p, std::move(rows));
    h.qc = QcDescriptor{p, shifts};
    return h;
}

namespace {

std::vector<std::vector<std::uint64_t>> to_bitrows(const SparseParityCheck& h) {
    const std::size_t words = (h.cols() + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(h.rows(), std::vector<std::uint64_t>(words, 0));
    for (std::size_t r = 0; r < h.rows(); ++r)
        for (int c : h.row(r))
            rows[r][static_cast<std::size_t>(c) >> 6] |= 1ULL << (c & 63);
    return rows;
}

} // namespace

std::size_t gf2_rank(const SparseParityCheck& h) {
    auto rows = to_bitrows(h);
    const std::size_t n = h.cols();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < n && rank < rows.size(); ++c) {
        const std::size_t w = c >> 6;
        const std::uint64_t bit = 1ULL << (c & 63);
        std::size_t pivot = rank;
        while (pivot < rows.size() && !(rows[pivot][w] & bit)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && (rows[r][w] & bit)) {
                for (std::size_t k = 0; k < rows[r].size(); ++k)
                    rows[r][k] ^= rows[rank][k];
            }
        }
        ++rank;
    }
    return rank;
}

std::vector<std::vector<std::uint8_t>> gf2_nullspace(const SparseParityCheck& h) {
    auto rows = to_bitrows(h);
    const std::size_t n = h.cols();
    std::vector<int> pivot_col(rows.size(), -1);
    std::size_t rank = 0;
    for (std::size_t c = 0; c < n && rank < rows.size(); ++c) {
        const std::size_t w = c >> 6;
        const std::uint64_t bit = 1ULL << (c & 63);
        std::size_t pivot = rank;
        while (pivot < rows.size() && !(rows[pivot][w] & bit)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && (rows[r][w] & bit))
                for (std::size_t k = 0; k < rows[r].size(); ++k)
                    rows[r][k] ^= rows[rank][k];
        pivot_col[rank] = static_cast<int>(c);
        ++rank;
    }
    std::vector<bool> is_pivot(n, false);
    for (std::size_t r = 0; r < rank; ++r) is_pivot[pivot_col[r]] = true;

    std::vector<std::vector<std::uint8_t>> basis;
    for (std::size_t free_c = 0; free_c < n; ++free_c) {
        if (is_pivot[free_c]) continue;
        std::vector<std::uint8_t> v(n, 0);
        v[free_c] = 1;
        for (std::size_t r = 0; r < rank; ++r) {
            if (rows[r][free_c >> 6] & (1ULL << (free_c & 63)))
                v[pivot_col[r]] = 1;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<std::uint8_t> syndrome(const SparseParityCheck& h, const std::vector<std::uint8_t>& word) {
    if (word.size() != h.cols())
        throw std::invalid_argument("word length does not match column count");
    std::vector<std::uint8_t> s(h.rows(), 0);
    for (std::size_t r = 0; r < h.rows(); ++r) {
        unsigned acc = 0;
        for (int c : h.row(r)) acc ^= word[c];
        s[r] = static_cast<std::uint8_t>(acc & 1);
    }
    return s;
}

bool is_codeword(const SparseParityCheck& h, const std::vector<std::uint8_t>& word) {
    auto s = syndrome(h, word);
    return std::all_of(s.begin(), s.end(), [](std::uint8_t b) { return b == 0; });
}

// Girth by BFS: for every edge (c0, v0), remove it and find the shortest
// path v0 -> c0 in the remaining graph; the shortest cycle through that edge
// is dist + 1. Nodes are numbered variables first, then checks.
std::size_t girth(const SparseParityCheck& h) {
    const std::size_t nv = h.cols(), nc = h.rows();
    if (nv == 0 || nc == 0) return kGirthInfinite;
    std::size_t best = kGirthInfinite;

    std::vector<std::pair<int, int>> edges;
    edges.reserve(h.num_edges());
    for (std::size_t r = 0; r < nc; ++r)
        for (int c : h.row(r)) edges.emplace_back(static_cast<int>(r), c);

#ifdef _OPENMP
#pragma omp parallel num_threads(worker_count())
#endif
    {
        std::vector<int> dist(nv + nc);
        std::size_t local_best = kGirthInfinite;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 16)
#endif
        for (long ei = 0; ei < static_cast<long>(edges.size()); ++ei) {
            const int c0 = edges[ei].first, v0 = edges[ei].second;
            std::fill(dist.begin(), dist.end(), -1);
            std::deque<int> queue;
            dist[v0] = 0;
            queue.push_back(v0);
            int found = -1;
            while (!queue.empty() && found < 0) {
                int u = queue.front();
                queue.pop_front();
                if (static_cast<std::size_t>(2 * dist[u]) + 1 >= local_best) break;
                if (u < static_cast<int>(nv)) {
                    for (int cc : h.col(u)) {
                        if (u == v0 && cc == c0) continue;  // skip the removed edge
                        int node = static_cast<int>(nv) + cc;
                        if (dist[node] < 0) {
                            dist[node] = dist[u] + 1;
                            if (cc == c0) { found = dist[node]; break; }
                            queue.push_back(node);
                        }
                    }
                } else {
                    int cc = u - static_cast<int>(nv);
                    for (int vv : h.row(cc)) {
                        if (vv == v0 && cc == c0) continue;
                        if (dist[vv] < 0) {
                            dist[vv] = dist[u] + 1;
                            queue.push_back(vv);
                        }
                    }
                }
            }
            if (found > 0) {
                std::size_t cycle = static_cast<std::size_t>(found) + 1;
                if (cycle < local_best) local_best = cycle;
            }
        }
#ifdef _OPENMP
#pragma omp critical
#endif
        {
            if (local_best < best) best = local_best;
        }
    }
    return best;
}

void save_alist(const SparseParityCheck& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    const std::size_t n = h.cols(), m = h.rows();
    std::size_t max_col = 0, max_row = 0;
    for (std::size_t c = 0; c < n; ++c) max_col = std::max(max_col, h.col(c).size());
    for (std::size_t r = 0; r < m; ++r) max_row = std::max(max_row, h.row(r).size());
    out << n << " " << m << "\n";
    out << max_col << " " << max_row << "\n";
    for (std::size_t c = 0; c < n; ++c) out << h.col(c).size() << (c + 1 < n ? " " : "\n");
    for (std::size_t r = 0; r < m; ++r) out << h.row(r).size() << (r + 1 < m ? " " : "\n");
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < max_col; ++i) {
            if (i) out << " ";
            out << (i < h.col(c).size() ? h.col(c)[i] + 1 : 0);
        }
        out << "\n";
    }
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t i = 0; i < max_row; ++i) {
            if (i) out << " ";
            out << (i < h.row(r).size() ? h.row(r)[i] + 1 : 0);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failure on " + path);
}

SparseParityCheck load_alist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto next_int = [&in, &path](long long lo, long long hi, const char* what) {
        long long v;
        if (!(in >> v)) throw std::runtime_error(path + ": truncated alist while reading " + what);
        if (v < lo || v > hi)
            throw std::runtime_error(path + ": " + what + " out of range: " + std::to_string(v));
        return v;
    };
    const auto n = static_cast<std::size_t>(next_int(1, 1LL << 30, "n"));
    const auto m = static_cast<std::size_t>(next_int(1, 1LL << 30, "m"));
    const auto max_col = static_cast<std::size_t>(next_int(0, static_cast<long long>(m), "max column degree"));
    const auto max_row = static_cast<std::size_t>(next_int(0, static_cast<long long>(n), "max row degree"));
    std::vector<std::size_t> col_deg(n), row_deg(m);
    for (auto& d : col_deg) d = static_cast<std::size_t>(next_int(0, static_cast<long long>(max_col), "column degree"));
    for (auto& d : row_deg) d = static_cast<std::size_t>(next_int(0, static_cast<long long>(max_row), "row degree"));

    // column lists: used only for transpose consistency validation
    std::vector<std::vector<int>> col_lists(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t seen = 0;
        for (std::size_t i = 0; i < max_col; ++i) {
            long long v = next_int(0, static_cast<long long>(m), "column neighbor");
            if (v == 0) continue;
            col_lists[c].push_back(static_cast<int>(v - 1));
            ++seen;
        }
        if (seen != col_deg[c])
            throw std::runtime_error(path + ": column " + std::to_string(c + 1) + " degree mismatch");
    }
    std::vector<std::vector<int>> row_lists(m);
    for (std::size_t r = 0; r < m; ++r) {
        std::size_t seen = 0;
        for (std::size_t i = 0; i < max_row; ++i) {
            long long v = next_int(0, static_cast<long long>(n), "row neighbor");
            if (v == 0) continue;
            row_lists[r].push_back(static_cast<int>(v - 1));
            ++seen;
        }
        if (seen != row_deg[r])
            throw std::runtime_error(path + ": row " + std::to_string(r + 1) + " degree mismatch");
    }
    SparseParityCheck h(m, n, std::move(row_lists));
    // transpose consistency against the column section
    for (std::size_t c = 0; c < n; ++c) {
        auto cl = col_lists[c];
        std::sort(cl.begin(), cl.end());
        if (std::adjacent_find(cl.begin(), cl.end()) != cl.end())
            throw std::runtime_error(path + ": duplicate neighbor in column " + std::to_string(c + 1));
        if (cl != h.col(c))
            throw std::runtime_error(path + ": row/column sections disagree at column " + std::to_string(c + 1));
    }
    return h;
}

TannerGraph::TannerGraph(const SparseParityCheck& h) : h_(&h) {
    check_edges_.assign(h.rows(), {});
    var_edges_.assign(h.cols(), {});
    edge_var_.reserve(h.num_edges());
    edge_check_.reserve(h.num_edges());
    int e = 0;
    for (std::size_t r = 0; r < h.rows(); ++r) {
        for (int c : h.row(r)) {
            edge_var_.push_back(c);
            edge_check_.push_back(static_cast<int>(r));
            check_edges_[r].push_back(e);
            var_edges_[c].push_back(e);
            ++e;
        }
    }
}

} // namespace floorline
