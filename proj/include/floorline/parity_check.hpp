#ifndef FLOORLINE_PARITY_CHECK_HPP
#define FLOORLINE_PARITY_CHECK_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace floorline {

struct QcDescriptor {
    std::size_t p = 0;                          // circulant size
    std::vector<std::vector<int>> shifts;       // d_v x d_c shift table
};

// Sparse binary parity-check matrix with both row and column adjacency.
// Immutable after construction; safe to share across threads.
class SparseParityCheck {
public:
    SparseParityCheck(std::size_t n_rows, std::size_t n_cols,
                      std::vector<std::vector<int>> row_support);

    std::size_t rows() const { return n_rows_; }
    std::size_t cols() const { return n_cols_; }
    const std::vector<int>& row(std::size_t r) const { return row_support_[r]; }
    const std::vector<int>& col(std::size_t c) const { return col_support_[c]; }
    const std::vector<std::vector<int>>& row_supports() const { return row_support_; }
    const std::vector<std::vector<int>>& col_supports() const { return col_support_; }
    std::size_t num_edges() const { return num_edges_; }

    std::optional<QcDescriptor> qc;

private:
    std::size_t n_rows_, n_cols_, num_edges_;
    std::vector<std::vector<int>> row_support_;  // per check, sorted variable indices
    std::vector<std::vector<int>> col_support_;  // per variable, sorted check indices
};

// Block entry (r,c) of circulant k is 1 iff c == r + k (mod p): the identity
// with its rows cyclically shifted to the left by k.
SparseParityCheck build_qc_matrix(const std::vector<std::vector<int>>& shifts, std::size_t p);

SparseParityCheck load_alist(const std::string& path);
void save_alist(const SparseParityCheck& h, const std::string& path);

std::size_t gf2_rank(const SparseParityCheck& h);

std::vector<std::uint8_t> syndrome(const SparseParityCheck& h, const std::vector<std::uint8_t>& word);
bool is_codeword(const SparseParityCheck& h, const std::vector<std::uint8_t>& word);

// Basis of the null space of H over GF(2); each vector is a codeword.
std::vector<std::vector<std::uint8_t>> gf2_nullspace(const SparseParityCheck& h);

inline constexpr std::size_t kGirthInfinite = std::numeric_limits<std::size_t>::max();

// Shortest cycle length in the Tanner graph, kGirthInfinite when acyclic.
std::size_t girth(const SparseParityCheck& h);

// Tanner graph edge numbering: edge ids assigned check-major (row by row,
// ascending variable index), a bijection onto (check, variable) pairs.
class TannerGraph {
public:
    explicit TannerGraph(const SparseParityCheck& h);

    const SparseParityCheck& matrix() const { return *h_; }
    std::size_t num_edges() const { return edge_var_.size(); }
    std::size_t num_checks() const { return h_->rows(); }
    std::size_t num_vars() const { return h_->cols(); }

    int edge_var(std::size_t e) const { return edge_var_[e]; }
    int edge_check(std::size_t e) const { return edge_check_[e]; }
    const std::vector<int>& check_edges(std::size_t c) const { return check_edges_[c]; }
    const std::vector<int>& var_edges(std::size_t v) const { return var_edges_[v]; }

private:
    const SparseParityCheck* h_;
    std::vector<int> edge_var_, edge_check_;
    std::vector<std::vector<int>> check_edges_, var_edges_;
};

} // namespace floorline

#endif
