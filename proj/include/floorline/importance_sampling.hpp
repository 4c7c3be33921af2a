#ifndef FLOORLINE_IMPORTANCE_SAMPLING_HPP
#define FLOORLINE_IMPORTANCE_SAMPLING_HPP

#include "floorline/decoder.hpp"
#include "floorline/parity_check.hpp"

#include <cstdint>
#include <vector>

namespace floorline {

struct BiasSpec {
    std::vector<std::vector<int>> target_sets;  // variable indices per set
    double shift = 0.0;        // mean displacement toward -1 on target bits
    enum class Selection { RoundRobin, Fixed } selection = Selection::RoundRobin;
    std::size_t fixed_index = 0;

    void validate(std::size_t n) const;
};

struct ISEstimate {
    double snr_db = 0.0;
    double sigma2 = 0.0;
    double ber = 0.0, fer = 0.0;
    double ber_se = 0.0, fer_se = 0.0;       // standard errors of the estimators
    // weighted estimators restricted to failures attributable to the biased
    // set: error support exactly the set, or covering a majority of it
    double fer_exact = 0.0, fer_exact_se = 0.0;
    double fer_majority = 0.0, fer_majority_se = 0.0;
    double rel_halfwidth = 0.0;              // 1.96 * fer_se / fer (0 when no events)
    long long raw_frame_errors = 0;          // unweighted decoder failures observed
    long long raw_bit_errors = 0;
    long long samples = 0;
    long long exact_support_failures = 0;    // error support equals the biased set
    std::vector<long long> per_set_failures; // failures attributed per target set
    bool no_events = false;                  // zero failures: estimate 0 is a bound, not a value
};

struct CampaignConfig {
    DecoderConfig decoder;
    std::vector<double> snrs_db;   // Eb/N0 grid
    double rate = 0.5;             // code rate for sigma^2 = 1 / (2 R Eb/N0)
    BiasSpec bias;
    long long samples = 10000;
    std::uint64_t seed = 1;
};

// Mean-shift importance sampling of the all-zero codeword over AWGN.
// Each trial draws its noise from a counter-based stream keyed on
// (seed, snr index, trial), so estimates are schedule independent; partial
// sums are reduced in fixed blocks, making results bit-identical for any
// worker count.
std::vector<ISEstimate> run_campaign(const TannerGraph& graph, const CampaignConfig& cfg);

struct OverbiasRow {
    double shift = 0.0;
    ISEstimate estimate;
    bool stable_with_prev = false;  // agrees with the previous row within 3 combined SE
};

// Runs the campaign once per shift at a single SNR; adjacent rows disagreeing
// by more than 3 combined standard errors flag over/under-biasing.
std::vector<OverbiasRow> overbias_scan(const TannerGraph& graph, CampaignConfig cfg,
                                       const std::vector<double>& shifts);

struct QuantizationCell {
    double tau = 0.0;
    int bits = 0;  // 0 = float
    std::vector<ISEstimate> estimates;
};

// Fixed-vs-float estimate grid over clip thresholds and bit widths; every
// cell uses the same seed so runs are comparable pointwise.
std::vector<QuantizationCell> quantization_sweep(const TannerGraph& graph, CampaignConfig cfg,
                                                 const std::vector<double>& taus,
                                                 const std::vector<int>& bits_list);

// Exact Gaussian log likelihood ratio of a received vector under the
// unbiased vs biased densities (sum over the biased coordinates).
double log_weight(const std::vector<double>& received, const std::vector<int>& targets,
                  double shift, double sigma2);

} // namespace floorline

#endif
