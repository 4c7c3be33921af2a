#include "reference.hpp"

#include "floorline/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace floorline::ref {

std::vector<double> check_update_tanh(const std::vector<double>& incoming, double clip) {
    const std::size_t d = incoming.size();
    std::vector<double> out(d);
    for (std::size_t j = 0; j < d; ++j) {
        double prod = 1.0;
        for (std::size_t l = 0; l < d; ++l)
            if (l != j) prod *= std::tanh(incoming[l] / 2.0);
        if (prod > 1.0 - 1e-12) prod = 1.0 - 1e-12;
        if (prod < -(1.0 - 1e-12)) prod = -(1.0 - 1e-12);
        double v = 2.0 * std::atanh(prod);
        out[j] = std::clamp(v, -clip, clip);
    }
    return out;
}

std::vector<double> check_update_cms(const std::vector<double>& incoming, double clip) {
    const std::size_t d = incoming.size();
    std::vector<double> out(d);
    const double L = std::log(static_cast<double>(d) - 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double mn = std::numeric_limits<double>::infinity();
        double sgn = 1.0;
        for (std::size_t l = 0; l < d; ++l) {
            if (l == j) continue;
            mn = std::min(mn, std::fabs(incoming[l]));
            if (incoming[l] < 0) sgn = -sgn;
        }
        const double ct = (mn >= 3.0 * L / 8.0) ? -L / 4.0 : 0.0;
        out[j] = std::clamp(sgn * (mn + ct), -clip, clip);
    }
    return out;
}

DecodeOutcome decode(const TannerGraph& graph, const std::vector<double>& llrs,
                     const DecoderConfig& cfg) {
    const std::size_t n = graph.num_vars(), m = graph.num_checks();
    auto clip = [&](double x) { return std::clamp(x, -cfg.clip, cfg.clip); };
    auto maybe_q = [&](double x) { return cfg.bits > 0 ? quantize(x, cfg.bits, cfg.clip) : x; };

    std::vector<double> intrinsic(n);
    for (std::size_t v = 0; v < n; ++v) intrinsic[v] = maybe_q(clip(llrs[v]));

    std::vector<double> vc(graph.num_edges()), cv(graph.num_edges());
    for (std::size_t e = 0; e < graph.num_edges(); ++e) vc[e] = intrinsic[graph.edge_var(e)];

    DecodeOutcome res;
    res.word.assign(n, 0);
    for (int it = 1; it <= cfg.max_iters; ++it) {
        for (std::size_t c = 0; c < m; ++c) {
            std::vector<double> in;
            for (int e : graph.check_edges(c)) in.push_back(vc[e]);
            auto out = cfg.algorithm == Algorithm::SumProduct ? check_update_tanh(in, cfg.clip)
                                                              : check_update_cms(in, cfg.clip);
            for (std::size_t i = 0; i < out.size(); ++i)
                cv[graph.check_edges(c)[i]] = maybe_q(out[i]);
        }
        std::vector<double> acc(n);
        for (std::size_t v = 0; v < n; ++v) {
            const auto& edges = graph.var_edges(v);
            for (std::size_t j = 0; j < edges.size(); ++j) {
                double s = intrinsic[v];
                for (std::size_t l = 0; l < edges.size(); ++l)
                    if (l != j) s += cv[edges[l]];
                vc[edges[j]] = maybe_q(clip(s));
            }
            double s = intrinsic[v];
            for (int e : edges) s += cv[e];
            acc[v] = clip(s);
            res.word[v] = acc[v] < 0 ? 1 : 0;
        }
        if (!cfg.trace_vars.empty()) {
            std::vector<double> row;
            for (int v : cfg.trace_vars) row.push_back(acc[v]);
            res.trace.push_back(row);
        }
        res.converged = is_codeword(graph.matrix(), res.word);
        res.iterations_used = it;
        if (res.converged && cfg.early_stop) break;
    }
    return res;
}

bool is_absorption_set(const SparseParityCheck& h, const std::vector<int>& variables) {
    std::vector<int> inc(h.rows(), 0);
    for (int v : variables)
        for (int c : h.col(v)) ++inc[c];
    for (int v : variables) {
        int odd = 0, even = 0;
        for (int c : h.col(v)) ((inc[c] % 2) ? odd : even) += 1;
        if (even <= odd) return false;
    }
    return !variables.empty();
}

std::map<std::pair<int, int>, std::size_t> enumerate_histogram(const SparseParityCheck& h,
                                                               int a_max, int b_max) {
    const int n = static_cast<int>(h.cols());
    if (n > 50 || a_max > 8)
        throw std::invalid_argument("raw enumeration limited to tiny instances");
    std::map<std::pair<int, int>, std::size_t> hist;
    std::vector<int> subset;
    auto recurse = [&](auto&& self, int next) -> void {
        if (!subset.empty() && static_cast<int>(subset.size()) <= a_max &&
            is_absorption_set(h, subset)) {
            std::vector<int> inc(h.rows(), 0);
            for (int v : subset)
                for (int c : h.col(v)) ++inc[c];
            int b = 0;
            for (int x : inc) b += x % 2;
            if (b <= b_max) ++hist[{static_cast<int>(subset.size()), b}];
        }
        if (static_cast<int>(subset.size()) == a_max) return;
        for (int v = next; v < n; ++v) {
            subset.push_back(v);
            self(self, v + 1);
            subset.pop_back();
        }
    };
    recurse(recurse, 0);
    return hist;
}

double linear_model_failure_mc(const SetLinearModel& model, double m_lambda,
                               const std::vector<double>& m_ext, int iters,
                               long long trials, std::uint64_t seed) {
    const int dim = model.dim;
    long long failures = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : failures)
#endif
    for (long long t = 0; t < trials; ++t) {
        Xoshiro256 rng(seed, 0, static_cast<std::uint64_t>(t));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> lambda_vars(model.num_vars);
        for (double& x : lambda_vars) x = m_lambda + std::sqrt(2.0 * m_lambda) * gauss(rng);
        std::vector<double> lam(dim);
        for (int e = 0; e < dim; ++e) lam[e] = lambda_vars[model.edge_var[e]];

        std::vector<double> x = lam, y(dim);
        for (int i = 1; i <= iters; ++i) {
            y = model.VC.apply(x);
            const double me = m_ext[i];
            std::vector<double> ext_vars(model.num_vars, 0.0);
            if (me > 0)
                for (int k = 0; k < model.num_vars; ++k)
                    for (int c = 0; c < model.var_ext_mult[k]; ++c)
                        ext_vars[k] += me + std::sqrt(2.0 * me) * gauss(rng);
            for (int e = 0; e < dim; ++e)
                y[e] += lam[e] + ext_vars[model.edge_var[e]];
            x.swap(y);
        }
        double mx = x[0];
        for (double v : x) mx = std::max(mx, v);
        if (mx <= 0) ++failures;
    }
    return static_cast<double>(failures) / static_cast<double>(trials);
}

std::vector<std::vector<std::uint8_t>> span_codebook(
    const std::vector<std::vector<std::uint8_t>>& basis) {
    if (basis.empty()) return {{}};
    if (basis.size() > 20) throw std::invalid_argument("codebook span too large");
    const std::size_t n = basis[0].size();
    std::vector<std::vector<std::uint8_t>> book;
    const std::size_t total = 1ULL << basis.size();
    for (std::size_t mask = 0; mask < total; ++mask) {
        std::vector<std::uint8_t> w(n, 0);
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (mask & (1ULL << i))
                for (std::size_t j = 0; j < n; ++j) w[j] ^= basis[i][j];
        book.push_back(std::move(w));
    }
    return book;
}

std::vector<std::uint8_t> map_bitwise(const std::vector<std::vector<std::uint8_t>>& codebook,
                                      const std::vector<double>& llrs) {
    const std::size_t n = llrs.size();
    // log p(y | c) up to a constant is sum of llr_j over bits where c_j = 0
    std::vector<double> logp(codebook.size());
    for (std::size_t i = 0; i < codebook.size(); ++i) {
        double s = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (codebook[i][j] == 0) s += llrs[j];
        logp[i] = s;
    }
    const double mx = *std::max_element(logp.begin(), logp.end());
    std::vector<std::uint8_t> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        double p0 = 0, p1 = 0;
        for (std::size_t i = 0; i < codebook.size(); ++i) {
            const double w = std::exp(logp[i] - mx);
            (codebook[i][j] ? p1 : p0) += w;
        }
        out[j] = p1 > p0 ? 1 : 0;
    }
    return out;
}

double failure_probability_grid(const TannerGraph& graph, const DecoderConfig& cfg,
                                double sigma2, int points_per_dim, double span_sigmas) {
    const std::size_t n = graph.num_vars();
    if (n > 4) throw std::invalid_argument("grid integration limited to very short codes");
    const double sigma = std::sqrt(sigma2);
    const double lo = 1.0 - span_sigmas * sigma, hi = 1.0 + span_sigmas * sigma;
    const double step = (hi - lo) / points_per_dim;

    // midpoint rule per axis with Gaussian weights
    std::vector<double> ys(points_per_dim), ws(points_per_dim);
    for (int i = 0; i < points_per_dim; ++i) {
        ys[i] = lo + (i + 0.5) * step;
        const double z = (ys[i] - 1.0) / sigma;
        ws[i] = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI)) * step;
    }
    double total = 0.0;
    std::vector<int> idx(n, 0);
    std::vector<double> llr(n);
    while (true) {
        double w = 1.0;
        for (std::size_t d = 0; d < n; ++d) w *= ws[idx[d]];
        for (std::size_t d = 0; d < n; ++d) llr[d] = 2.0 * ys[idx[d]] / sigma2;
        auto outcome = decode(graph, llr, cfg);
        bool fail = false;
        for (auto b : outcome.word)
            if (b) { fail = true; break; }
        if (fail) total += w;
        std::size_t d = 0;
        while (d < n && ++idx[d] == points_per_dim) idx[d++] = 0;
        if (d == n) break;
    }
    return total;
}

} // namespace floorline::ref
