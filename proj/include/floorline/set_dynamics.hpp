#ifndef FLOORLINE_SET_DYNAMICS_HPP
#define FLOORLINE_SET_DYNAMICS_HPP

#include "floorline/absorption.hpp"

#include <cstdint>
#include <vector>

namespace floorline {

// Small dense square matrix, row major.
struct DenseMatrix {
    int n = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    explicit DenseMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    static DenseMatrix identity(int n);
    DenseMatrix times(const DenseMatrix& other) const;
    std::vector<double> apply(const std::vector<double>& x) const;         // A x
    std::vector<double> apply_left(const std::vector<double>& x) const;    // x^T A
};

// Linearized absorption-set model. V is block diagonal with (J - I) blocks,
// one block per variable over its internal edges; C is the permutation that
// reflects each edge onto its partner across the shared satisfied check.
struct SetLinearModel {
    int dim = 0;
    int num_vars = 0;
    DenseMatrix V, C, VC;
    std::vector<int> edge_var;        // local variable of each edge
    std::vector<int> ext_mult;        // per edge: unsatisfied checks of its variable
    std::vector<int> var_ext_mult;    // per variable
    double mu_max = 0.0;
    std::vector<double> v_max;
};

SetLinearModel build_model(const SetTopology& topo);

// Power iteration with the deterministic all-ones start; converged when
// successive Rayleigh quotients differ by < 1e-12. v_max is sign-normalized
// so its entry sum is positive. Throws on non-convergence (a complex
// dominant pair would present that way).
void dominant_eigen(SetLinearModel& model, int max_iters = 200000);

struct TopologyCoefficients {
    double A = 0, B = 0, C = 0, D = 0;
};

TopologyCoefficients topology_coefficients(const SetLinearModel& model);

struct ErrorFloorInputs {
    double m_lambda = 0.0;          // mean of the channel intrinsic LLR, 2/sigma^2
    std::vector<double> m_ext;      // [i] = extrinsic mean at iteration i; [0] ignored
    std::vector<double> gain;       // [i] = check gain g_i; gain[0] = 1
    int iters = 0;
    double tau = 10.0;              // means saturate at tau, variances at 2 tau

    static ErrorFloorInputs make(double m_lambda, std::vector<double> m_ext,
                                 std::vector<double> gain, double tau);
    void validate() const;
};

// Q-function failure probability with the spectral approximation, unit gains.
double p_as_basic(const TopologyCoefficients& c, double mu_max, const ErrorFloorInputs& in);

// Gain-corrected variant: every term i carries 1 / (mu^i prod_{l<=i} g_l).
double p_as_refined(const TopologyCoefficients& c, double mu_max, const ErrorFloorInputs& in);

struct MatrixEvaluation {
    int argmax_edge = 0;   // component of maximal mean (lowest index on ties)
    double mean = 0.0;
    double stddev = 0.0;
};

// Matrix-form evaluation: exact powers of VC for the mean vector, failure
// read off the maximal-mean component with its variance assembled from the
// per-input linear coefficients (no spectral step anywhere).
double p_as_matrix(const SetLinearModel& model, const ErrorFloorInputs& in,
                   MatrixEvaluation* detail = nullptr);

struct BerContribution {
    int a = 0;
    double multiplicity = 0;
    double p_as = 0;
};

// Union-style floor estimate: sum of multiplicity * (a/n) * P_AS, clamped to [0,1].
double ber_estimate(const std::vector<BerContribution>& sets, std::size_t n);

} // namespace floorline

#endif
