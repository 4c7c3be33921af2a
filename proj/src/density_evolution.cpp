#include "floorline/density_evolution.hpp"
#include "floorline/math_util.hpp"
#include "floorline/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace floorline {

namespace {

constexpr double kMassSkip = 1e-30;

double density_mean(const std::vector<double>& p, const std::vector<double>& grid) {
    KahanSum s;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] != 0.0) s.add(static_cast<long double>(p[k]) * grid[k]);
    return static_cast<double>(s.value());
}

void normalize(std::vector<double>& p) {
    KahanSum s;
    for (double v : p) s.add(v);
    const double total = static_cast<double>(s.value());
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::runtime_error("density mass drifted beyond tolerance");
    for (double& v : p) v /= total;
}

// Round-robin rows per worker, per-worker buffers merged in worker order:
// results are bit-identical for a fixed worker count.
template <typename RowFn>
void accumulate_rows(int K, std::vector<double>& out, RowFn&& fn) {
    const int nthreads = std::min(worker_count(), K);
    std::vector<std::vector<double>> locals(nthreads);
#ifdef _OPENMP
#pragma omp parallel num_threads(nthreads)
#endif
    {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
        const int nt = omp_get_num_threads();
#else
        const int tid = 0, nt = 1;
#endif
        auto& local = locals[tid];
        local.assign(K, 0.0);
        for (int i = tid; i < K; i += nt) fn(i, local);
    }
    out.assign(K, 0.0);
    for (const auto& local : locals)
        if (!local.empty())
            for (int k = 0; k < K; ++k) out[k] += local[k];
}

// out = density of boxplus(X, Y), results rounded to the nearest grid point
void check_combine(const std::vector<double>& px, const std::vector<double>& py,
                   const std::vector<double>& grid, double tau, double delta,
                   const std::uint16_t* pair_table, std::vector<double>& out) {
    const int K = static_cast<int>(grid.size());
    accumulate_rows(K, out, [&](int i, std::vector<double>& local) {
        const double pi = px[i];
        if (pi < kMassSkip) return;
        if (pair_table) {
            const std::uint16_t* row = pair_table + static_cast<std::size_t>(i) * K;
            for (int j = 0; j < K; ++j) {
                const double pj = py[j];
                if (pj < kMassSkip) continue;
                local[row[j]] += pi * pj;
            }
        } else {
            const double xi = grid[i];
            for (int j = 0; j < K; ++j) {
                const double pj = py[j];
                if (pj < kMassSkip) continue;
                const double z = boxplus(xi, grid[j]);
                int k = static_cast<int>(std::lround((z + tau) / delta));
                if (k < 0) k = 0;
                if (k >= K) k = K - 1;
                local[k] += pi * pj;
            }
        }
    });
}

// out = density of X + Y with clipping mass folded onto the endpoints; the
// grid is closed under addition so no rounding happens here
void var_combine(const std::vector<double>& px, const std::vector<double>& py,
                 std::vector<double>& out) {
    const int K = static_cast<int>(px.size());
    const int center = (K - 1) / 2;
    accumulate_rows(K, out, [&](int i, std::vector<double>& local) {
        const double pi = px[i];
        if (pi < kMassSkip) return;
        for (int j = 0; j < K; ++j) {
            const double pj = py[j];
            if (pj < kMassSkip) continue;
            int k = i + j - center;
            if (k < 0) k = 0;
            if (k >= K) k = K - 1;
            local[k] += pi * pj;
        }
    });
}

} // namespace

double gain_factor(int dc, const std::vector<double>& density, const std::vector<double>& grid) {
    if (dc < 2) throw std::invalid_argument("dc must be >= 2");
    if (dc == 2) return 1.0;  // empty product
    KahanSum s;
    for (std::size_t k = 0; k < density.size(); ++k)
        if (density[k] != 0.0) s.add(static_cast<long double>(density[k]) * std::tanh(grid[k] * 0.5));
    double e = static_cast<double>(s.value());
    return std::pow(e, dc - 2);
}

double gain_factor_meanfield(int dc, double mean) {
    if (dc < 2) throw std::invalid_argument("dc must be >= 2");
    if (dc == 2) return 1.0;
    return std::pow(std::tanh(mean * 0.5), dc - 2);
}

DensityModel evolve(int dv, int dc, double sigma2, double tau, int bins, int iters, GainMode mode) {
    if (dv < 2 || dc < 2) throw std::invalid_argument("need dv >= 2 and dc >= 2");
    if (sigma2 <= 0 || tau <= 0) throw std::invalid_argument("sigma2 and tau must be positive");
    if (iters < 1) throw std::invalid_argument("iters must be >= 1");
    if (bins < 8) throw std::invalid_argument("grid too small");
    if (bins % 2) ++bins;  // keep zero on the grid

    DensityModel dm;
    dm.tau = tau;
    dm.points = bins + 1;
    const int K = dm.points;
    const double delta = 2.0 * tau / bins;
    dm.grid.resize(K);
    for (int k = 0; k < K; ++k) dm.grid[k] = -tau + k * delta;

    // intrinsic N(m, 2m) integrated over cells, tails folded onto the endpoints
    const double m_lambda = 2.0 / sigma2;
    const double sd = std::sqrt(2.0 * m_lambda);
    auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    std::vector<double> intrinsic(K);
    for (int k = 0; k < K; ++k) {
        const double lo = (k == 0) ? -std::numeric_limits<double>::infinity() : dm.grid[k] - delta / 2;
        const double hi = (k == K - 1) ? std::numeric_limits<double>::infinity() : dm.grid[k] + delta / 2;
        const double flo = std::isinf(lo) ? 0.0 : phi((lo - m_lambda) / sd);
        const double fhi = std::isinf(hi) ? 1.0 : phi((hi - m_lambda) / sd);
        intrinsic[k] = std::max(0.0, fhi - flo);
    }
    normalize(intrinsic);

    // coarse-grid guard: the cell width must resolve the intrinsic spread and
    // the discretized mean must track the analytic mean of the clipped
    // intrinsic to within 1% of 2/sigma^2
    {
        if (delta > 0.5 * sd)
            throw std::runtime_error("LLR grid too coarse for this sigma/tau");
        const double alpha = (-tau - m_lambda) / sd, beta = (tau - m_lambda) / sd;
        auto pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
        const double mid = m_lambda * (phi(beta) - phi(alpha)) - sd * (pdf(beta) - pdf(alpha));
        const double analytic = mid + tau * (1.0 - phi(beta)) - tau * phi(alpha);
        if (std::fabs(density_mean(intrinsic, dm.grid) - analytic) > 0.01 * m_lambda)
            throw std::runtime_error("LLR grid too coarse for this sigma/tau");
    }

    // pairwise boxplus index table when it fits comfortably in memory
    std::vector<std::uint16_t> table;
    if (K <= 4609) {
        table.resize(static_cast<std::size_t>(K) * K);
        const int nthreads = worker_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
        for (int i = 0; i < K; ++i) {
            std::uint16_t* row = table.data() + static_cast<std::size_t>(i) * K;
            for (int j = 0; j < K; ++j) {
                const double z = boxplus(dm.grid[i], dm.grid[j]);
                int k = static_cast<int>(std::lround((z + tau) / delta));
                if (k < 0) k = 0;
                if (k >= K) k = K - 1;
                row[j] = static_cast<std::uint16_t>(k);
            }
        }
    }
    const std::uint16_t* tbl = table.empty() ? nullptr : table.data();

    dm.m_ext.assign(iters + 1, 0.0);
    dm.m_vc.assign(iters + 1, 0.0);
    dm.gain.assign(iters + 1, 1.0);

    std::vector<double> vc = intrinsic, cv, tmp;
    for (int it = 1; it <= iters; ++it) {
        dm.m_vc[it] = density_mean(vc, dm.grid);
        dm.gain[it] = (mode == GainMode::IndependentDraws)
                          ? gain_factor(dc, vc, dm.grid)
                          : gain_factor_meanfield(dc, dm.m_vc[it]);
        // check->variable: combine dc-1 incoming densities
        cv = vc;
        for (int r = 0; r < dc - 2; ++r) {
            check_combine(cv, vc, dm.grid, tau, delta, tbl, tmp);
            cv.swap(tmp);
        }
        normalize(cv);
        dm.m_ext[it] = density_mean(cv, dm.grid);
        // variable->check: intrinsic plus dv-1 incoming check messages
        if (it < iters) {
            std::vector<double> nxt = intrinsic;
            for (int r = 0; r < dv - 1; ++r) {
                var_combine(nxt, cv, tmp);
                nxt.swap(tmp);
            }
            normalize(nxt);
            vc.swap(nxt);
        }
    }
    dm.cv_density = std::move(cv);
    dm.vc_density = std::move(vc);
    return dm;
}

} // namespace floorline
