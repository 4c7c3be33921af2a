#include "floorline/decoder.hpp"
#include "floorline/parallel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace floorline {

namespace {

constexpr double kProductClamp = 1.0 - 1e-12;
constexpr std::size_t kMaxDegree = 64;

inline double clip_llr(double x, double tau) {
    if (x > tau) return tau;
    if (x < -tau) return -tau;
    return x;
}

} // namespace

void DecoderConfig::validate(std::size_t n_vars) const {
    if (clip <= 0) throw std::invalid_argument("clip threshold must be positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (bits != 0 && bits < 2) throw std::invalid_argument("fixed-point width must be >= 2 bits");
    for (int v : trace_vars)
        if (v < 0 || static_cast<std::size_t>(v) >= n_vars)
            throw std::invalid_argument("trace variable index out of range");
}

void check_update_tanh(std::span<const double> incoming, double clip, std::span<double> out) {
    const std::size_t d = incoming.size();
    assert(out.size() == d);
    if (d == 1) { out[0] = 0.0; return; }
    // prefix/suffix products avoid dividing by tanh terms near zero
    static thread_local std::vector<double> tanhv, prefix, suffix;
    tanhv.resize(d); prefix.resize(d + 1); suffix.resize(d + 1);
    for (std::size_t i = 0; i < d; ++i) tanhv[i] = std::tanh(incoming[i] * 0.5);
    prefix[0] = 1.0;
    for (std::size_t i = 0; i < d; ++i) prefix[i + 1] = prefix[i] * tanhv[i];
    suffix[d] = 1.0;
    for (std::size_t i = d; i-- > 0;) suffix[i] = suffix[i + 1] * tanhv[i];
    for (std::size_t j = 0; j < d; ++j) {
        double p = prefix[j] * suffix[j + 1];
        if (p > kProductClamp) p = kProductClamp;
        if (p < -kProductClamp) p = -kProductClamp;
        out[j] = clip_llr(2.0 * std::atanh(p), clip);
    }
}

void check_update_cms(std::span<const double> incoming, double clip, std::span<double> out) {
    const std::size_t d = incoming.size();
    assert(out.size() == d);
    if (d == 1) { out[0] = 0.0; return; }
    const double log_dc = std::log(static_cast<double>(d) - 1.0);
    const double ct = -log_dc / 4.0;
    const double ct_threshold = 3.0 * log_dc / 8.0;

    double min1 = std::numeric_limits<double>::infinity();
    double min2 = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    int neg_count = 0;
    for (std::size_t i = 0; i < d; ++i) {
        const double a = std::fabs(incoming[i]);
        if (a < min1) { min2 = min1; min1 = a; argmin = i; }
        else if (a < min2) { min2 = a; }
        if (incoming[i] < 0) ++neg_count;  // sign(0) = +1
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double mn = (j == argmin) ? min2 : min1;
        double mag = mn;
        if (mn >= ct_threshold) {
            mag = mn + ct;
            assert(mag >= 0.0);  // guaranteed by the threshold: mn + ct >= ln(d-1)/8
        }
        const int negs = neg_count - (incoming[j] < 0 ? 1 : 0);
        const double sgn = (negs & 1) ? -1.0 : 1.0;
        out[j] = clip_llr(sgn * mag, clip);
    }
}

void variable_update(double intrinsic, std::span<const double> incoming, double clip,
                     std::span<double> out, double& accumulated) {
    const std::size_t d = incoming.size();
    assert(out.size() == d);
    for (std::size_t j = 0; j < d; ++j) {
        double s = intrinsic;
        for (std::size_t l = 0; l < d; ++l)
            if (l != j) s += incoming[l];
        out[j] = clip_llr(s, clip);
    }
    double s = intrinsic;
    for (std::size_t l = 0; l < d; ++l) s += incoming[l];
    accumulated = clip_llr(s, clip);
}

double quantize(double llr, int bits, double clip) {
    const double kmax = static_cast<double>((1 << (bits - 1)) - 1);
    const double delta = clip / kmax;
    double k = std::floor(std::fabs(llr) / delta + 0.5);
    if (k > kmax) k = kmax;
    return std::copysign(k * delta, llr);
}

DecodeOutcome decode(const TannerGraph& graph, std::span<const double> channel_llrs,
                     const DecoderConfig& cfg) {
    const std::size_t n = graph.num_vars();
    const std::size_t m = graph.num_checks();
    const std::size_t ne = graph.num_edges();
    cfg.validate(n);
    if (channel_llrs.size() != n)
        throw std::invalid_argument("LLR vector length does not match code length");

    const double tau = cfg.clip;
    const bool fixed = cfg.bits > 0;
    const int nthreads = worker_count();
    bool parallel = nthreads > 1 && n >= 512;
#ifdef _OPENMP
    if (omp_in_parallel()) parallel = false;  // campaigns parallelize over trials
#endif

    for (std::size_t c = 0; c < m; ++c)
        if (graph.check_edges(c).size() > kMaxDegree)
            throw std::invalid_argument("check degree exceeds decoder limit");
    for (std::size_t v = 0; v < n; ++v)
        if (graph.var_edges(v).size() > kMaxDegree)
            throw std::invalid_argument("variable degree exceeds decoder limit");

    // workspaces persist per thread across calls: campaigns decode millions
    // of frames and per-call allocation dominates otherwise
    static thread_local std::vector<double> intrinsic, var_to_check, check_to_var, accumulated;
    static thread_local std::vector<std::uint8_t> hard;
    intrinsic.resize(n);
    var_to_check.resize(ne);
    check_to_var.resize(ne);
    accumulated.resize(n);
    hard.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        double x = clip_llr(channel_llrs[v], tau);
        intrinsic[v] = fixed ? quantize(x, cfg.bits, tau) : x;
    }
    for (std::size_t e = 0; e < ne; ++e) var_to_check[e] = intrinsic[graph.edge_var(e)];

    // thread_local names resolve per executing thread inside the parallel
    // lambdas below; bind the owning thread's buffers explicitly
    double* const intr = intrinsic.data();
    double* const vtc = var_to_check.data();
    double* const ctv = check_to_var.data();
    double* const accum = accumulated.data();
    std::uint8_t* const hardp = hard.data();

    DecodeOutcome outcome;
    outcome.word.assign(n, 0);

    auto check_one = [&, vtc, ctv](std::size_t c) {
        const auto& edges = graph.check_edges(c);
        const std::size_t d = edges.size();
        double in[kMaxDegree], out[kMaxDegree];
        for (std::size_t i = 0; i < d; ++i) in[i] = vtc[edges[i]];
        if (cfg.algorithm == Algorithm::SumProduct)
            check_update_tanh({in, d}, tau, {out, d});
        else
            check_update_cms({in, d}, tau, {out, d});
        for (std::size_t i = 0; i < d; ++i)
            ctv[edges[i]] = fixed ? quantize(out[i], cfg.bits, tau) : out[i];
    };
    auto check_pass = [&]() {
        if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
            for (long c = 0; c < static_cast<long>(m); ++c) check_one(c);
        } else {
            for (std::size_t c = 0; c < m; ++c) check_one(c);
        }
    };

    auto variable_one = [&, intr, vtc, ctv, accum, hardp](std::size_t v) {
        const auto& edges = graph.var_edges(v);
        const std::size_t d = edges.size();
        double in[kMaxDegree], out[kMaxDegree];
        for (std::size_t i = 0; i < d; ++i) in[i] = ctv[edges[i]];
        double acc;
        variable_update(intr[v], {in, d}, tau, {out, d}, acc);
        for (std::size_t i = 0; i < d; ++i)
            vtc[edges[i]] = fixed ? quantize(out[i], cfg.bits, tau) : out[i];
        accum[v] = acc;
        hardp[v] = acc < 0 ? 1 : 0;  // tie (acc == 0) decodes to bit 0
    };
    auto variable_pass = [&]() {
        if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
            for (long v = 0; v < static_cast<long>(n); ++v) variable_one(v);
        } else {
            for (std::size_t v = 0; v < n; ++v) variable_one(v);
        }
    };

    auto syndrome_ok = [&]() {
        for (std::size_t c = 0; c < m; ++c) {
            unsigned acc = 0;
            for (int e : graph.check_edges(c)) acc ^= hard[graph.edge_var(e)];
            if (acc & 1) return false;
        }
        return true;
    };

    auto mean_of = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };

    bool converged = false;
    int used = cfg.max_iters;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        check_pass();
        if (cfg.record_message_means) outcome.mean_check_to_var.push_back(mean_of(check_to_var));
        variable_pass();
        if (cfg.record_message_means) outcome.mean_var_to_check.push_back(mean_of(var_to_check));
        if (!cfg.trace_vars.empty()) {
            std::vector<double> row(cfg.trace_vars.size());
            for (std::size_t k = 0; k < cfg.trace_vars.size(); ++k)
                row[k] = accumulated[cfg.trace_vars[k]];
            outcome.trace.push_back(std::move(row));
        }
        converged = syndrome_ok();
        used = it;
        if (converged && cfg.early_stop) break;
    }
    outcome.converged = converged;
    outcome.iterations_used = used;
    outcome.word = hard;
    return outcome;
}

} // namespace floorline
