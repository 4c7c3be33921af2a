#include "floorline/set_dynamics.hpp"
#include "floorline/math_util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace floorline {

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::times(const DenseMatrix& other) const {
    DenseMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double v = at(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < n; ++j) out.at(i, j) += v * other.at(k, j);
        }
    return out;
}

std::vector<double> DenseMatrix::apply(const std::vector<double>& x) const {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> DenseMatrix::apply_left(const std::vector<double>& x) const {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double v = x[i];
        if (v == 0.0) continue;
        for (int j = 0; j < n; ++j) y[j] += v * at(i, j);
    }
    return y;
}

SetLinearModel build_model(const SetTopology& topo) {
    SetLinearModel model;
    model.dim = topo.num_edges();
    model.num_vars = topo.num_vars;
    model.V = DenseMatrix(model.dim);
    model.C = DenseMatrix(model.dim);
    model.edge_var.resize(model.dim);
    model.ext_mult.resize(model.dim);
    model.var_ext_mult = topo.ext_degree;

    std::vector<std::vector<int>> check_edges(topo.internal_checks.size());
    for (int e = 0; e < model.dim; ++e) {
        auto [var, check] = topo.edges[e];
        model.edge_var[e] = var;
        model.ext_mult[e] = topo.ext_degree[var];
        check_edges[check].push_back(e);
    }
    for (const auto& pair : check_edges) {
        if (pair.size() != 2)
            throw std::invalid_argument("internal check does not have exactly two edges");
        model.C.at(pair[0], pair[1]) = 1.0;
        model.C.at(pair[1], pair[0]) = 1.0;
    }
    for (int e = 0; e < model.dim; ++e)
        for (int f = 0; f < model.dim; ++f)
            if (e != f && model.edge_var[e] == model.edge_var[f]) model.V.at(e, f) = 1.0;
    model.VC = model.V.times(model.C);
    return model;
}

void dominant_eigen(SetLinearModel& model, int max_iters) {
    const int n = model.dim;
    if (n == 0) throw std::invalid_argument("empty model");
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double rayleigh_prev = 0.0;
    bool have_prev = false;
    for (int it = 0; it < max_iters; ++it) {
        auto y = model.VC.apply(x);
        double norm = 0.0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("power iteration hit the zero vector");
        for (double& v : y) v /= norm;
        auto z = model.VC.apply(y);
        double rayleigh = 0.0;
        for (int i = 0; i < n; ++i) rayleigh += y[i] * z[i];
        x = std::move(y);
        if (have_prev && std::fabs(rayleigh - rayleigh_prev) < 1e-12) {
            double sum = 0.0;
            for (double v : x) sum += v;
            if (sum < 0)
                for (double& v : x) v = -v;
            model.mu_max = rayleigh;
            model.v_max = std::move(x);
            return;
        }
        rayleigh_prev = rayleigh;
        have_prev = true;
    }
    throw std::runtime_error(
        "power iteration did not converge; the dominant eigenvalue may be complex");
}

TopologyCoefficients topology_coefficients(const SetLinearModel& model) {
    if (model.v_max.empty())
        throw std::logic_error("dominant eigenpair not computed");
    TopologyCoefficients c;
    std::vector<double> per_var(model.num_vars, 0.0);
    for (int e = 0; e < model.dim; ++e) {
        c.A += model.v_max[e];
        c.B += model.ext_mult[e] * model.v_max[e];
        per_var[model.edge_var[e]] += model.v_max[e];
    }
    for (int k = 0; k < model.num_vars; ++k) {
        c.C += per_var[k] * per_var[k];
        c.D += model.var_ext_mult[k] * per_var[k] * per_var[k];
    }
    return c;
}

ErrorFloorInputs ErrorFloorInputs::make(double m_lambda, std::vector<double> m_ext,
                                        std::vector<double> gain, double tau) {
    ErrorFloorInputs in;
    in.m_lambda = m_lambda;
    in.iters = static_cast<int>(m_ext.size()) - 1;
    in.m_ext = std::move(m_ext);
    in.gain = std::move(gain);
    in.tau = tau;
    in.validate();
    return in;
}

void ErrorFloorInputs::validate() const {
    if (tau <= 0) throw std::invalid_argument("tau must be positive");
    if (iters < 0) throw std::invalid_argument("iteration count must be >= 0");
    if (m_ext.size() != static_cast<std::size_t>(iters) + 1 ||
        gain.size() != static_cast<std::size_t>(iters) + 1)
        throw std::invalid_argument("m_ext and gain must have iters+1 entries");
    if (gain[0] != 1.0) throw std::invalid_argument("gain[0] is 1 by definition");
    for (int i = 1; i <= iters; ++i)
        if (!(gain[i] > 0.0) || gain[i] > 1.0)
            throw std::invalid_argument("gains must lie in (0, 1]");
}

namespace {

// saturate means at tau; negative DE transients count as zero mass
inline long double sat_mean(double m, double tau) {
    if (m < 0) return 0.0L;
    return m > tau ? static_cast<long double>(tau) : static_cast<long double>(m);
}

long double q_arg_spectral(const TopologyCoefficients& c, double mu_max,
                           const ErrorFloorInputs& in, bool with_gains) {
    const int I = in.iters;
    const long double ml = sat_mean(in.m_lambda, in.tau);
    KahanSum s1, s2, s3;
    long double w = 1.0L;  // mu^-i prod_{l<=i} 1/g_l
    for (int i = 0; i <= I; ++i) {
        if (i > 0) {
            w /= mu_max;
            if (with_gains) w /= in.gain[i];
        }
        s1.add(w);
        if (i > 0) {
            const long double me = sat_mean(in.m_ext[i], in.tau);
            s2.add(me * w);
            s3.add(me * w * w);
        }
    }
    const long double S1 = s1.value(), S2 = s2.value(), S3 = s3.value();
    const long double num = c.A * ml * S1 + c.B * S2;
    const long double den = sqrtl(2.0L * c.C * ml * S1 * S1 + 2.0L * c.D * S3);
    if (den == 0.0L) return num > 0 ? 1e9L : 0.0L;
    return num / den;
}

} // namespace

double p_as_basic(const TopologyCoefficients& c, double mu_max, const ErrorFloorInputs& in) {
    in.validate();
    return static_cast<double>(q_func(q_arg_spectral(c, mu_max, in, false)));
}

double p_as_refined(const TopologyCoefficients& c, double mu_max, const ErrorFloorInputs& in) {
    in.validate();
    return static_cast<double>(q_func(q_arg_spectral(c, mu_max, in, true)));
}

double p_as_matrix(const SetLinearModel& model, const ErrorFloorInputs& in,
                   MatrixEvaluation* detail) {
    in.validate();
    const int n = model.dim;
    const int I = in.iters;
    const long double ml = sat_mean(in.m_lambda, in.tau);

    // delta_i = prod_{l=i+1..I} g_l: the gain an injection at iteration i
    // still passes through on its way to iteration I
    std::vector<long double> delta(I + 1, 1.0L);
    for (int i = I - 1; i >= 0; --i) delta[i] = delta[i + 1] * in.gain[i + 1];

    std::vector<long double> me(I + 1, 0.0L);
    for (int i = 1; i <= I; ++i) me[i] = sat_mean(in.m_ext[i], in.tau);

    // mean vector via Horner over injections: r <- VC r + delta_i inj_i
    std::vector<long double> mean(n);
    for (int e = 0; e < n; ++e) mean[e] = delta[0] * ml;  // inj_0, m_ext(0) = 0
    for (int i = 1; i <= I; ++i) {
        std::vector<long double> next(n, 0.0L);
        for (int r = 0; r < n; ++r) {
            long double s = 0.0L;
            const double* row = &model.VC.a[static_cast<std::size_t>(r) * n];
            for (int k = 0; k < n; ++k)
                if (row[k] != 0.0) s += mean[k];
            next[r] = s + delta[i] * (ml + me[i] * model.ext_mult[r]);
        }
        mean = std::move(next);
    }
    int jstar = 0;
    for (int e = 1; e < n; ++e)
        if (mean[e] > mean[jstar]) jstar = e;

    // per-variable coefficient sums s[t][k] of e_jstar^T (VC)^t
    std::vector<std::vector<long double>> var_sum(I + 1, std::vector<long double>(model.num_vars, 0.0L));
    std::vector<long double> row(n, 0.0L);
    row[jstar] = 1.0L;
    for (int t = 0; t <= I; ++t) {
        for (int e = 0; e < n; ++e)
            var_sum[t][model.edge_var[e]] += row[e];
        if (t == I) break;
        std::vector<long double> next(n, 0.0L);
        for (int r = 0; r < n; ++r) {
            if (row[r] == 0.0L) continue;
            const double* mrow = &model.VC.a[static_cast<std::size_t>(r) * n];
            for (int k = 0; k < n; ++k)
                if (mrow[k] != 0.0) next[k] += row[r];
        }
        row = std::move(next);
    }

    KahanSum var;
    for (int k = 0; k < model.num_vars; ++k) {
        KahanSum ak;
        for (int i = 0; i <= I; ++i) ak.add(delta[i] * var_sum[I - i][k]);
        var.add(2.0L * ml * ak.value() * ak.value());
    }
    for (int i = 1; i <= I; ++i) {
        if (me[i] == 0.0L) continue;
        for (int k = 0; k < model.num_vars; ++k) {
            if (model.var_ext_mult[k] == 0) continue;
            const long double bik = delta[i] * var_sum[I - i][k];
            var.add(2.0L * me[i] * bik * bik * model.var_ext_mult[k]);
        }
    }
    const long double sd = sqrtl(var.value());
    if (detail) {
        detail->argmax_edge = jstar;
        detail->mean = static_cast<double>(mean[jstar]);
        detail->stddev = static_cast<double>(sd);
    }
    if (sd == 0.0L) return mean[jstar] > 0 ? 0.0 : 1.0;
    return static_cast<double>(q_func(mean[jstar] / sd));
}

double ber_estimate(const std::vector<BerContribution>& sets, std::size_t n) {
    if (n == 0) throw std::invalid_argument("code length must be positive");
    KahanSum sum;
    for (const auto& s : sets)
        sum.add(static_cast<long double>(s.multiplicity) * s.a / static_cast<long double>(n) * s.p_as);
    long double v = sum.value();
    if (v < 0) v = 0;
    if (v > 1) v = 1;
    return static_cast<double>(v);
}

} // namespace floorline
