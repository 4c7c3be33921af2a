#ifndef FLOORLINE_REF_REFERENCE_HPP
#define FLOORLINE_REF_REFERENCE_HPP

// Straightforward serial implementations kept as oracles for the production
// kernels. These trade speed for obviousness and must stay independent of
// the code paths they check.

#include "floorline/absorption.hpp"
#include "floorline/decoder.hpp"
#include "floorline/parity_check.hpp"
#include "floorline/set_dynamics.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace floorline::ref {

// Tanh-rule check update via the direct per-output product.
std::vector<double> check_update_tanh(const std::vector<double>& incoming, double clip);

std::vector<double> check_update_cms(const std::vector<double>& incoming, double clip);

// Plain serial flooding decoder (no shared prefix products, no threading).
DecodeOutcome decode(const TannerGraph& graph, const std::vector<double>& llrs,
                     const DecoderConfig& cfg);

// Definition-1 test recomputed from scratch.
bool is_absorption_set(const SparseParityCheck& h, const std::vector<int>& variables);

// Raw subset enumeration, feasible only for small codes.
std::map<std::pair<int, int>, std::size_t> enumerate_histogram(const SparseParityCheck& h,
                                                               int a_max, int b_max);

// Monte-Carlo simulation of the linear set recursion
//   x_i = VC x_{i-1} + lambda + lambda_i_ext,  x_0 = lambda,
// with lambda_k ~ N(m_lambda, 2 m_lambda) per variable and
// lambda_ext_{i,c} ~ N(m_ext(i), 2 m_ext(i)) per unsatisfied check.
// Returns the empirical Pr(max_j x_{I,j} <= 0).
double linear_model_failure_mc(const SetLinearModel& model, double m_lambda,
                               const std::vector<double>& m_ext, int iters,
                               long long trials, std::uint64_t seed);

// Exact bitwise MAP decisions over an explicit codebook (exhaustive).
std::vector<std::uint8_t> map_bitwise(const std::vector<std::vector<std::uint8_t>>& codebook,
                                      const std::vector<double>& llrs);

// All codewords spanned by a nullspace basis (2^k words; keep k small).
std::vector<std::vector<std::uint8_t>> span_codebook(
    const std::vector<std::vector<std::uint8_t>>& basis);

// Decoder failure probability for a tiny code by brute-force Gaussian grid
// integration over the received vector (all-zero codeword transmitted).
double failure_probability_grid(const TannerGraph& graph, const DecoderConfig& cfg,
                                double sigma2, int points_per_dim, double span_sigmas);

} // namespace floorline::ref

#endif
