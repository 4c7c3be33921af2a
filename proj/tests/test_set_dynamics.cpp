#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "floorline/set_dynamics.hpp"
#include "ref/reference.hpp"

#include <cmath>

using namespace floorline;

namespace {

// synthetic but valid inputs: extrinsic means ramp to tau, gains ramp to 1
ErrorFloorInputs ramp_inputs(double m_lambda, int iters, double tau,
                             double ext_step = 2.0, bool with_gains = false) {
    std::vector<double> m_ext(iters + 1, 0.0), gain(iters + 1, 1.0);
    for (int i = 1; i <= iters; ++i) {
        m_ext[i] = std::min(tau, ext_step * i);
        if (with_gains) gain[i] = std::min(1.0, 0.85 + 0.05 * i);
    }
    return ErrorFloorInputs::make(m_lambda, m_ext, gain, tau);
}

} // namespace

TEST_CASE("build_model: Tanner (8,2) has the published V/C structure") {
    auto model = build_model(fixtures::tanner82_topology());
    CHECK(model.dim == 22);

    // V: block diagonal J - I with block sizes 3,3,3,2,2,3,3,3
    const std::vector<int> sizes{3, 3, 3, 2, 2, 3, 3, 3};
    int off = 0;
    for (int blk = 0; blk < 8; ++blk) {
        for (int i = off; i < off + sizes[blk]; ++i)
            for (int j = off; j < off + sizes[blk]; ++j)
                CHECK(model.V.at(i, j) == (i == j ? 0.0 : 1.0));
        off += sizes[blk];
    }
    // V vanishes outside the blocks
    double total = 0;
    for (double x : model.V.a) total += x;
    double inside = 0;
    for (int s : sizes) inside += s * (s - 1);
    CHECK(total == inside);

    // C is a symmetric permutation with empty diagonal
    for (int i = 0; i < model.dim; ++i) {
        int ones = 0;
        for (int j = 0; j < model.dim; ++j) {
            if (model.C.at(i, j) != 0) ++ones;
            CHECK(model.C.at(i, j) == model.C.at(j, i));
        }
        CHECK(ones == 1);
        CHECK(model.C.at(i, i) == 0.0);
    }
    // extrinsic injections sit on edges 10..13 (1-based): the degree-2 variables
    for (int e = 0; e < model.dim; ++e)
        CHECK(model.ext_mult[e] == ((e >= 9 && e <= 12) ? 1 : 0));
}

TEST_CASE("dominant eigenpair: Tanner (8,2) matches the published values") {
    auto model = build_model(fixtures::tanner82_topology());
    dominant_eigen(model);
    CHECK(model.mu_max == doctest::Approx(1.7870).epsilon(5e-4));
    auto paper = fixtures::tanner82_eigenvector();
    REQUIRE(model.v_max.size() == paper.size());
    for (std::size_t i = 0; i < paper.size(); ++i)
        CHECK(std::fabs(model.v_max[i] - paper[i]) < 1e-3);

    // eigen residual ||VC v - mu v|| below tolerance
    auto r = model.VC.apply(model.v_max);
    double res = 0;
    for (int i = 0; i < model.dim; ++i) res += std::pow(r[i] - model.mu_max * model.v_max[i], 2);
    CHECK(std::sqrt(res) < 1e-9);
}

TEST_CASE("dominant eigenpair: IEEE (8,8) is exactly (4, uniform)") {
    auto model = build_model(fixtures::ieee88_topology());
    CHECK(model.dim == 40);
    dominant_eigen(model);
    CHECK(std::fabs(model.mu_max - 4.0) < 1e-9);
    const double u = 1.0 / std::sqrt(40.0);
    for (double v : model.v_max) CHECK(std::fabs(v - u) < 1e-9);
}

TEST_CASE("4-cycle pseudo-set: VC is a permutation with mu_max = 1") {
    auto topo = make_topology(2, {{0, 1}, {0, 1}}, {0, 0});
    auto model = build_model(topo);
    CHECK(model.dim == 4);
    dominant_eigen(model);
    CHECK(model.mu_max == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : model.v_max) CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("topology coefficients") {
    SUBCASE("Tanner (8,2): B and D use edges 10..13") {
        auto model = build_model(fixtures::tanner82_topology());
        dominant_eigen(model);
        auto c = topology_coefficients(model);
        const auto& v = model.v_max;
        double a_direct = 0;
        for (double x : v) a_direct += x;
        CHECK(c.A == doctest::Approx(a_direct).epsilon(1e-12));
        CHECK(c.B == doctest::Approx(v[9] + v[10] + v[11] + v[12]).epsilon(1e-12));
        CHECK(c.D == doctest::Approx(std::pow(v[9] + v[10], 2) + std::pow(v[11] + v[12], 2))
                         .epsilon(1e-12));
        double c_direct = 0;
        const std::vector<std::pair<int, int>> blocks{{0, 3},   {3, 6},   {6, 9},   {9, 11},
                                                      {11, 13}, {13, 16}, {16, 19}, {19, 22}};
        for (auto [lo, hi] : blocks) {
            double s = 0;
            for (int i = lo; i < hi; ++i) s += v[i];
            c_direct += s * s;
        }
        CHECK(c.C == doctest::Approx(c_direct).epsilon(1e-12));
    }
    SUBCASE("IEEE (8,8): A = B and C = D by symmetry") {
        auto model = build_model(fixtures::ieee88_topology());
        dominant_eigen(model);
        auto c = topology_coefficients(model);
        CHECK(c.A == doctest::Approx(c.B).epsilon(1e-12));
        CHECK(c.C == doctest::Approx(c.D).epsilon(1e-12));
        CHECK(c.A == doctest::Approx(std::sqrt(40.0)).epsilon(1e-9));
        CHECK(c.C == doctest::Approx(5.0).epsilon(1e-9));
    }
    SUBCASE("uniform eigenvector gives C = a (d_int v)^2") {
        auto model = build_model(fixtures::ieee88_topology());
        dominant_eigen(model);
        auto c = topology_coefficients(model);
        const double v = 1.0 / std::sqrt(40.0);
        CHECK(c.C == doctest::Approx(8.0 * std::pow(5.0 * v, 2)).epsilon(1e-9));
    }
}

TEST_CASE("p_as_basic: I = 0 closed form") {
    auto model = build_model(fixtures::ieee88_topology());
    dominant_eigen(model);
    auto c = topology_coefficients(model);
    ErrorFloorInputs in = ErrorFloorInputs::make(4.0, {0.0}, {1.0}, 10.0);
    const double expect = 0.5 * std::erfc(c.A * std::sqrt(4.0 / (2.0 * c.C)) / std::sqrt(2.0));
    CHECK(p_as_basic(c, model.mu_max, in) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("p_as_basic: frozen value and nested-sum oracle, IEEE-style coefficients") {
    // A=C=8, B=D=8 (the published equivalent form), m_ext = 0, m_lambda = 4,
    // I = 10: the sums collapse and the argument is exactly A sqrt(m/(2C)) = 4
    TopologyCoefficients c{8, 8, 8, 8};
    std::vector<double> zeros(11, 0.0), ones(11, 1.0);
    auto in = ErrorFloorInputs::make(4.0, zeros, ones, 10.0);
    const double p = p_as_basic(c, 4.0, in);
    CHECK(p == doctest::Approx(3.16712418331e-05).epsilon(1e-9));

    // independent straightforward re-evaluation of the full nested sums
    auto naive = [&](double mu, double ml, const std::vector<double>& me, int iters) {
        long double s1 = 0, s2 = 0, s3 = 0;
        for (int i = 0; i <= iters; ++i) {
            const long double w = powl(mu, -i);
            s1 += w;
            if (i >= 1) {
                s2 += me[i] * w;
                s3 += me[i] * w * w;
            }
        }
        const long double num = c.A * ml * s1 + c.B * s2;
        const long double den = sqrtl(2 * c.C * ml * s1 * s1 + 2 * c.D * s3);
        return static_cast<double>(0.5L * erfcl(num / den / sqrtl(2.0L)));
    };
    std::vector<double> me(11, 0.0);
    for (int i = 1; i <= 10; ++i) me[i] = std::min(10.0, 1.5 * i);
    auto in2 = ErrorFloorInputs::make(4.0, me, ones, 10.0);
    CHECK(p_as_basic(c, 4.0, in2) == doctest::Approx(naive(4.0, 4.0, me, 10)).epsilon(1e-12));
}

TEST_CASE("p_as_refined with unit gains degenerates to p_as_basic") {
    auto model = build_model(fixtures::tanner82_topology());
    dominant_eigen(model);
    auto c = topology_coefficients(model);
    auto in = ramp_inputs(4.0, 20, 10.0);
    CHECK(p_as_refined(c, model.mu_max, in) == doctest::Approx(p_as_basic(c, model.mu_max, in)));
}

TEST_CASE("monotonicity of the failure probability") {
    auto model = build_model(fixtures::tanner82_topology());
    dominant_eigen(model);
    auto c = topology_coefficients(model);

    SUBCASE("nonincreasing in m_lambda") {
        double prev = 1.0;
        for (double ml : {1.0, 2.0, 4.0, 6.0, 8.0}) {
            auto in = ramp_inputs(ml, 15, 10.0, 1.0, true);
            const double p = p_as_refined(c, model.mu_max, in);
            CHECK(p < prev);
            prev = p;
        }
    }
    SUBCASE("nonincreasing in every m_ext step") {
        auto base = ramp_inputs(3.0, 12, 10.0, 0.8);
        const double p0 = p_as_refined(c, model.mu_max, base);
        const double pm0 = p_as_matrix(model, base);
        for (int i = 1; i <= 12; i += 3) {
            auto bumped = base;
            bumped.m_ext[i] = std::min(10.0, bumped.m_ext[i] + 0.5);
            CHECK(p_as_refined(c, model.mu_max, bumped) <= p0 + 1e-18);
            CHECK(p_as_matrix(model, bumped) <= pm0 + 1e-18);
        }
    }
    SUBCASE("nondecreasing in mu_max") {
        auto in = ramp_inputs(3.0, 12, 10.0, 0.8);
        double prev = 0.0;
        for (double mu : {1.2, 1.5, 1.787, 2.2, 3.0}) {
            const double p = p_as_basic(c, mu, in);
            CHECK(p >= prev);
            prev = p;
        }
    }
    SUBCASE("raising tau lowers the probability when extrinsics can grow") {
        double prev = 1.0;
        for (double tau : {10.0, 100.0, 1000.0}) {
            std::vector<double> me(31, 0.0), g(31, 1.0);
            for (int i = 1; i <= 30; ++i) me[i] = std::min(tau, std::pow(1.9, i));
            auto in = ErrorFloorInputs::make(6.0, me, g, tau);
            const double p = p_as_refined(c, model.mu_max, in);
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("IEEE symmetry: p_as_matrix equals p_as_refined to 1e-12 relative at deep I") {
    auto model = build_model(fixtures::ieee88_topology());
    dominant_eigen(model);
    auto c = topology_coefficients(model);
    for (double ml : {2.0, 4.0}) {
        auto in = ramp_inputs(ml, 50, 10.0, 2.0, true);
        const double pr = p_as_refined(c, model.mu_max, in);
        const double pm = p_as_matrix(model, in);
        CHECK(std::fabs(pr - pm) / pr < 1e-12);
    }
}

TEST_CASE("matrix evaluation details") {
    SUBCASE("Tanner (8,2): maximal-mean component is edge 6 or 15 (1-based)") {
        auto model = build_model(fixtures::tanner82_topology());
        dominant_eigen(model);
        auto in = ramp_inputs(4.0, 10, 10.0);
        MatrixEvaluation detail;
        p_as_matrix(model, in, &detail);
        CHECK((detail.argmax_edge == 5 || detail.argmax_edge == 14));
    }
    SUBCASE("I = 0 reduces to Q(m/sigma) with sigma^2 = 2m") {
        auto model = build_model(fixtures::tanner82_topology());
        dominant_eigen(model);
        auto in = ErrorFloorInputs::make(4.0, {0.0}, {1.0}, 10.0);
        MatrixEvaluation detail;
        const double p = p_as_matrix(model, in, &detail);
        CHECK(detail.mean == doctest::Approx(4.0));
        CHECK(detail.stddev == doctest::Approx(std::sqrt(8.0)));
        CHECK(p ==
              doctest::Approx(0.5 * std::erfc(4.0 / std::sqrt(8.0) / std::sqrt(2.0))).epsilon(1e-12));
    }
}

TEST_CASE("spectral and matrix evaluations converge together for the IEEE set") {
    auto model = build_model(fixtures::ieee88_topology());
    dominant_eigen(model);
    auto c = topology_coefficients(model);
    double prev_gap = 1e9;
    for (int iters : {6, 12, 24, 48}) {
        auto in = ramp_inputs(2.0, iters, 10.0);
        const double pb = p_as_basic(c, model.mu_max, in);
        const double pm = p_as_matrix(model, in);
        const double gap = std::fabs(std::log(pb / pm));
        CHECK(gap <= prev_gap + 1e-12);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-9);
}

TEST_CASE("linear-model Monte-Carlo oracle matches p_as_matrix (desk scale)") {
    auto model = build_model(fixtures::tanner82_topology());
    dominant_eigen(model);
    const int iters = 50;
    std::vector<double> me(iters + 1, 0.0), g(iters + 1, 1.0);
    for (int i = 1; i <= iters; ++i) me[i] = std::min(2.0, 0.25 * i);
    for (double ml : {0.7, 1.0}) {
        auto in = ErrorFloorInputs::make(ml, me, g, 10.0);
        const double formula = p_as_matrix(model, in);
        const long long trials = 200000;
        const double mc = ref::linear_model_failure_mc(model, ml, me, iters, trials, 99);
        const double se = std::sqrt(std::max(mc, 1e-12) * (1 - mc) / trials);
        CHECK(std::fabs(formula - mc) < 3 * se);
    }
}

TEST_CASE("ber_estimate plumbing") {
    CHECK(ber_estimate({{8, 1.0, 0.5}}, 155) == doctest::Approx(8.0 * 0.5 / 155.0));
    CHECK(ber_estimate({{8, 465.0, 1e-6}}, 155) == doctest::Approx(465.0 * 8.0 / 155.0 * 1e-6));
    // dominant term carries the aggregate when one P is 100x the other
    const double both = ber_estimate({{8, 465, 1e-4}, {8, 465, 1e-6}}, 155);
    const double dominant = ber_estimate({{8, 465, 1e-4}}, 155);
    CHECK(std::fabs(both - dominant) / both < 0.011);
    // clamped to [0, 1]
    CHECK(ber_estimate({{155, 1e9, 1.0}}, 155) == 1.0);
}
