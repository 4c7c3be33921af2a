#ifndef FLOORLINE_DECODER_HPP
#define FLOORLINE_DECODER_HPP

#include "floorline/parity_check.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace floorline {

enum class Algorithm { SumProduct, CorrectedMinSum };

struct DecoderConfig {
    Algorithm algorithm = Algorithm::SumProduct;
    int max_iters = 50;
    double clip = 10.0;          // tau, LLR magnitude bound
    int bits = 0;                // 0 = floating point, otherwise fixed(bits)
    bool early_stop = true;      // stop when the hard decision is a codeword
    std::vector<int> trace_vars; // accumulated-LLR trace for these variables
    bool record_message_means = false;  // per-iteration mean of each message family

    void validate(std::size_t n_vars) const;
};

struct DecodeOutcome {
    std::vector<std::uint8_t> word;
    bool converged = false;
    int iterations_used = 0;
    // trace[t][k] = accumulated LLR of trace_vars[k] after iteration t+1
    std::vector<std::vector<double>> trace;
    std::vector<double> mean_check_to_var;  // per iteration, when recorded
    std::vector<double> mean_var_to_check;
};

// Tanh-rule check update, Eq.-(40) semantics: the product of tanh(m/2) terms
// is clamped to |p| <= 1 - 1e-12 before atanh, which is exactly the numerical
// saturation this algorithm exhibits on saturated inputs.
void check_update_tanh(std::span<const double> incoming, double clip, std::span<double> out);

// Corrected min-sum: (min_{l != j} |m_l| + CT) * prod of signs, with
// CT = -ln(d_c - 1)/4 once the excluded min is >= 3 ln(d_c - 1)/8, else 0.
// sign(0) counts as +1.
void check_update_cms(std::span<const double> incoming, double clip, std::span<double> out);

// Outgoing j = clip(lambda + sum_{l != j} incoming_l); also returns the
// clipped full accumulation. Hard decision is 1 iff the accumulation < 0.
void variable_update(double intrinsic, std::span<const double> incoming, double clip,
                     std::span<double> out, double& accumulated);

// Uniform symmetric quantizer: levels k*Delta, k in [-(2^{b-1}-1), 2^{b-1}-1],
// Delta = clip / (2^{b-1}-1), round half away from zero.
double quantize(double llr, int bits, double clip);

// Flooding-schedule decode: all checks fire, then all variables. A call owns
// its message memory; concurrent decodes may share one graph.
DecodeOutcome decode(const TannerGraph& graph, std::span<const double> channel_llrs,
                     const DecoderConfig& cfg);

} // namespace floorline

#endif
