#include "floorline/importance_sampling.hpp"
#include "floorline/math_util.hpp"
#include "floorline/parallel.hpp"
#include "floorline/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace floorline {

void BiasSpec::validate(std::size_t n) const {
    if (shift < 0) throw std::invalid_argument("bias shift must be >= 0");
    for (const auto& set : target_sets) {
        if (set.empty()) throw std::invalid_argument("empty bias target set");
        for (int v : set)
            if (v < 0 || static_cast<std::size_t>(v) >= n)
                throw std::invalid_argument("bias target index out of range");
    }
    if (selection == Selection::Fixed && fixed_index >= target_sets.size() && !target_sets.empty())
        throw std::invalid_argument("fixed bias set index out of range");
}

double log_weight(const std::vector<double>& received, const std::vector<int>& targets,
                  double shift, double sigma2) {
    KahanSum lw;
    for (int k : targets)
        lw.add((shift * (received[k] - 1.0) + 0.5 * shift * shift) / sigma2);
    return static_cast<double>(lw.value());
}

namespace {

constexpr long long kReduceBlock = 4096;

struct BlockTally {
    long double ber_sum = 0, ber_sq = 0;
    long double fer_sum = 0, fer_sq = 0;
    long double exact_sum = 0, exact_sq = 0;
    long double maj_sum = 0, maj_sq = 0;
    long long raw_frames = 0, raw_bits = 0, exact_support = 0;
    std::vector<long long> per_set;
};

} // namespace

std::vector<ISEstimate> run_campaign(const TannerGraph& graph, const CampaignConfig& cfg) {
    const std::size_t n = graph.num_vars();
    cfg.decoder.validate(n);
    cfg.bias.validate(n);
    if (cfg.samples < 1) throw std::invalid_argument("sample budget must be >= 1");
    if (cfg.rate <= 0 || cfg.rate >= 1) throw std::invalid_argument("rate must be in (0,1)");

    const auto& sets = cfg.bias.target_sets;
    const std::size_t num_sets = sets.size();
    const bool biased = cfg.bias.shift > 0 && num_sets > 0;

    std::vector<ISEstimate> results;
    for (std::size_t pt = 0; pt < cfg.snrs_db.size(); ++pt) {
        const double ebn0 = std::pow(10.0, cfg.snrs_db[pt] / 10.0);
        const double sigma2 = 1.0 / (2.0 * cfg.rate * ebn0);
        const double sigma = std::sqrt(sigma2);

        const long long num_blocks = (cfg.samples + kReduceBlock - 1) / kReduceBlock;
        std::vector<BlockTally> blocks(num_blocks);
        for (auto& b : blocks) b.per_set.assign(std::max<std::size_t>(num_sets, 1), 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
#endif
        for (long long blk = 0; blk < num_blocks; ++blk) {
            BlockTally& tally = blocks[blk];
            std::vector<double> received(n), llr(n);
            const long long lo = blk * kReduceBlock;
            const long long hi = std::min(cfg.samples, lo + kReduceBlock);
            for (long long trial = lo; trial < hi; ++trial) {
                Xoshiro256 rng(cfg.seed, pt, static_cast<std::uint64_t>(trial));
                std::normal_distribution<double> gauss(0.0, 1.0);
                const std::vector<int>* target = nullptr;
                if (biased) {
                    const std::size_t si = cfg.bias.selection == BiasSpec::Selection::Fixed
                                               ? cfg.bias.fixed_index
                                               : static_cast<std::size_t>(trial) % num_sets;
                    target = &sets[si];
                }
                for (std::size_t v = 0; v < n; ++v) received[v] = 1.0 + sigma * gauss(rng);
                if (target)
                    for (int v : *target) received[v] -= cfg.bias.shift;
                for (std::size_t v = 0; v < n; ++v) llr[v] = 2.0 * received[v] / sigma2;

                auto outcome = decode(graph, llr, cfg.decoder);
                long long bit_errors = 0;
                for (std::size_t v = 0; v < n; ++v) bit_errors += outcome.word[v];
                if (bit_errors == 0) continue;

                tally.raw_frames += 1;
                tally.raw_bits += bit_errors;
                const double w = target ? std::exp(log_weight(received, *target, cfg.bias.shift, sigma2))
                                        : 1.0;
                const long double xf = w;
                const long double xb = w * static_cast<long double>(bit_errors) / static_cast<long double>(n);
                tally.fer_sum += xf;
                tally.fer_sq += xf * xf;
                tally.ber_sum += xb;
                tally.ber_sq += xb * xb;
                if (target) {
                    const std::size_t si = cfg.bias.selection == BiasSpec::Selection::Fixed
                                               ? cfg.bias.fixed_index
                                               : static_cast<std::size_t>(trial) % num_sets;
                    tally.per_set[si] += 1;
                    long long in_set = 0;
                    for (int v : *target) in_set += outcome.word[v];
                    const bool exact = bit_errors == static_cast<long long>(target->size()) &&
                                       in_set == static_cast<long long>(target->size());
                    const bool majority = 2 * in_set >= static_cast<long long>(target->size());
                    if (exact) {
                        tally.exact_support += 1;
                        tally.exact_sum += xf;
                        tally.exact_sq += xf * xf;
                    }
                    if (majority) {
                        tally.maj_sum += xf;
                        tally.maj_sq += xf * xf;
                    }
                }
            }
        }

        // fixed-order reduction over blocks keeps results thread-count independent
        ISEstimate est;
        est.snr_db = cfg.snrs_db[pt];
        est.sigma2 = sigma2;
        est.samples = cfg.samples;
        est.per_set_failures.assign(num_sets, 0);
        KahanSum fer_sum, fer_sq, ber_sum, ber_sq, ex_sum, ex_sq, mj_sum, mj_sq;
        for (const auto& b : blocks) {
            fer_sum.add(b.fer_sum);
            fer_sq.add(b.fer_sq);
            ber_sum.add(b.ber_sum);
            ber_sq.add(b.ber_sq);
            ex_sum.add(b.exact_sum);
            ex_sq.add(b.exact_sq);
            mj_sum.add(b.maj_sum);
            mj_sq.add(b.maj_sq);
            est.raw_frame_errors += b.raw_frames;
            est.raw_bit_errors += b.raw_bits;
            est.exact_support_failures += b.exact_support;
            for (std::size_t s = 0; s < num_sets; ++s) est.per_set_failures[s] += b.per_set[s];
        }
        const long double N = static_cast<long double>(cfg.samples);
        est.fer = static_cast<double>(fer_sum.value() / N);
        est.ber = static_cast<double>(ber_sum.value() / N);
        est.fer_exact = static_cast<double>(ex_sum.value() / N);
        est.fer_majority = static_cast<double>(mj_sum.value() / N);
        if (cfg.samples > 1) {
            auto se = [N](const KahanSum& s, const KahanSum& sq) {
                const long double var =
                    std::max(0.0L, (sq.value() - s.value() * s.value() / N) / (N - 1));
                return static_cast<double>(sqrtl(var / N));
            };
            est.fer_se = se(fer_sum, fer_sq);
            est.ber_se = se(ber_sum, ber_sq);
            est.fer_exact_se = se(ex_sum, ex_sq);
            est.fer_majority_se = se(mj_sum, mj_sq);
        }
        est.no_events = est.raw_frame_errors == 0;
        est.rel_halfwidth = est.fer > 0 ? 1.96 * est.fer_se / est.fer : 0.0;
        results.push_back(std::move(est));
    }
    return results;
}

std::vector<OverbiasRow> overbias_scan(const TannerGraph& graph, CampaignConfig cfg,
                                       const std::vector<double>& shifts) {
    if (shifts.empty()) throw std::invalid_argument("need at least one shift");
    if (cfg.snrs_db.size() != 1)
        throw std::invalid_argument("overbias scan expects a single SNR point");
    std::vector<OverbiasRow> rows;
    for (double s : shifts) {
        cfg.bias.shift = s;
        OverbiasRow row;
        row.shift = s;
        row.estimate = run_campaign(graph, cfg)[0];
        if (!rows.empty()) {
            const auto& prev = rows.back().estimate;
            const double diff = std::fabs(row.estimate.fer - prev.fer);
            const double band = 3.0 * std::sqrt(row.estimate.fer_se * row.estimate.fer_se +
                                                prev.fer_se * prev.fer_se);
            row.stable_with_prev = diff <= band && !row.estimate.no_events && !prev.no_events;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<QuantizationCell> quantization_sweep(const TannerGraph& graph, CampaignConfig cfg,
                                                 const std::vector<double>& taus,
                                                 const std::vector<int>& bits_list) {
    std::vector<QuantizationCell> cells;
    for (double tau : taus) {
        for (int bits : bits_list) {
            QuantizationCell cell;
            cell.tau = tau;
            cell.bits = bits;
            cfg.decoder.clip = tau;
            cfg.decoder.bits = bits;
            cell.estimates = run_campaign(graph, cfg);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

} // namespace floorline
