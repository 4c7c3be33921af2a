#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "floorline/importance_sampling.hpp"
#include "floorline/rng.hpp"
#include "ref/reference.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

using namespace floorline;

namespace {

// [3,1] repetition code: sum-product is exact MAP, failure is the halfspace
// y1+y2+y3 < 0, so the failure probability is Q(sqrt(3)/sigma) exactly
SparseParityCheck repetition3() { return SparseParityCheck(2, 3, {{0, 1}, {0, 2}}); }

CampaignConfig toy_campaign(double snr_db, double shift, long long samples, std::uint64_t seed) {
    CampaignConfig cfg;
    cfg.decoder.algorithm = Algorithm::SumProduct;
    cfg.decoder.clip = 100.0;
    cfg.decoder.max_iters = 6;
    cfg.snrs_db = {snr_db};
    cfg.rate = 1.0 / 3.0;
    cfg.bias.target_sets = {{0, 1, 2}};
    cfg.bias.shift = shift;
    cfg.samples = samples;
    cfg.seed = seed;
    return cfg;
}

double toy_sigma2(double snr_db) { return 1.0 / (2.0 * (1.0 / 3.0) * std::pow(10.0, snr_db / 10.0)); }

} // namespace

TEST_CASE("log_weight matches a first-principles Gaussian density ratio") {
    const double sigma2 = 0.37, shift = 0.83;
    std::vector<int> targets{0, 2, 5};
    Xoshiro256 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> y(7);
        for (auto& v : y) v = 1.0 - shift * 0.5 + std::sqrt(sigma2) * gauss(rng);
        auto logpdf = [&](double x, double mean) {
            return -0.5 * std::log(2.0 * M_PI * sigma2) - std::pow(x - mean, 2) / (2.0 * sigma2);
        };
        double expect = 0.0;
        for (int k : targets) expect += logpdf(y[k], 1.0) - logpdf(y[k], 1.0 - shift);
        CHECK(std::fabs(log_weight(y, targets, shift, sigma2) - expect) < 1e-10);
    }
}

TEST_CASE("shift 0 reduces to plain Monte Carlo with indicator weights") {
    auto h = repetition3();
    TannerGraph g(h);
    auto cfg = toy_campaign(-1.0, 0.0, 5000, 7);  // low SNR so failures are common
    auto est = run_campaign(g, cfg)[0];
    CHECK(est.raw_frame_errors > 0);
    CHECK(est.fer == doctest::Approx(static_cast<double>(est.raw_frame_errors) / cfg.samples)
                         .epsilon(1e-15));
    CHECK(est.ber ==
          doctest::Approx(static_cast<double>(est.raw_bit_errors) / (3.0 * cfg.samples)).epsilon(1e-15));
}

TEST_CASE("grid-integration oracle matches the analytic toy failure probability") {
    auto h = repetition3();
    TannerGraph g(h);
    DecoderConfig dec;
    dec.algorithm = Algorithm::SumProduct;
    dec.clip = 100.0;
    dec.max_iters = 6;
    const double snr_db = 9.03;  // P about 3e-5: inside the 1e-6..1e-3 window
    const double sigma2 = toy_sigma2(snr_db);
    const double analytic = 0.5 * std::erfc(std::sqrt(3.0 / sigma2) / std::sqrt(2.0));
    CHECK(analytic > 1e-6);
    CHECK(analytic < 1e-3);
    const double integral = ref::failure_probability_grid(g, dec, sigma2, 121, 8.0);
    CHECK(std::fabs(integral - analytic) / analytic < 0.05);
}

TEST_CASE("IS estimate agrees with the oracle within 3 standard errors (toy)") {
    auto h = repetition3();
    TannerGraph g(h);
    const double snr_db = 9.03;
    const double analytic = 0.5 * std::erfc(std::sqrt(3.0 / toy_sigma2(snr_db)) / std::sqrt(2.0));
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto est = run_campaign(g, toy_campaign(snr_db, 0.8, 20000, seed))[0];
        CHECK_FALSE(est.no_events);
        if (std::fabs(est.fer - analytic) <= 3.0 * est.fer_se) ++hits;
    }
    CHECK(hits >= 5);
}

TEST_CASE("bit determinism: same seed and config, any thread count") {
    auto h = fixtures::tanner_code();
    TannerGraph g(h);
    CampaignConfig cfg;
    cfg.decoder.algorithm = Algorithm::CorrectedMinSum;
    cfg.decoder.clip = 10.0;
    cfg.decoder.max_iters = 20;
    cfg.snrs_db = {3.0};
    cfg.rate = 64.0 / 155.0;
    cfg.samples = 3000;
    cfg.seed = 11;
    auto a = run_campaign(g, cfg)[0];
    setenv("FLOORLINE_THREADS", "3", 1);
    auto b = run_campaign(g, cfg)[0];
    setenv("FLOORLINE_THREADS", "1", 1);
    auto c = run_campaign(g, cfg)[0];
    unsetenv("FLOORLINE_THREADS");
    CHECK(a.fer == b.fer);
    CHECK(b.fer == c.fer);
    CHECK(a.ber == b.ber);
    CHECK(a.raw_frame_errors == b.raw_frame_errors);
    CHECK(a.fer_se == b.fer_se);
}

TEST_CASE("overbias scan flags a far-past-the-boundary shift on the toy code") {
    auto h = repetition3();
    TannerGraph g(h);
    const double snr_db = 9.03;
    const double analytic = 0.5 * std::erfc(std::sqrt(3.0 / toy_sigma2(snr_db)) / std::sqrt(2.0));
    auto cfg = toy_campaign(snr_db, 0.0, 20000, 3);
    auto rows = overbias_scan(g, cfg, {0.7, 0.9, 3.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].stable_with_prev);  // adjacent moderate shifts agree
    CHECK_FALSE(rows[2].stable_with_prev);
    CHECK(rows[2].estimate.fer < 0.1 * analytic);  // over-biased: gross underestimate
    CHECK(rows[0].estimate.fer == doctest::Approx(analytic).epsilon(0.5));
}

TEST_CASE("single zero shift degenerates to one plain-MC row") {
    auto h = repetition3();
    TannerGraph g(h);
    auto cfg = toy_campaign(-1.0, 0.0, 4000, 9);
    auto rows = overbias_scan(g, cfg, {0.0});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].estimate.fer ==
          doctest::Approx(static_cast<double>(rows[0].estimate.raw_frame_errors) / 4000).epsilon(1e-15));
}

TEST_CASE("quantization: very wide fixed point is indistinguishable from float") {
    auto h = fixtures::tanner_code();
    TannerGraph g(h);
    CampaignConfig cfg;
    cfg.decoder.algorithm = Algorithm::CorrectedMinSum;
    cfg.decoder.max_iters = 20;
    cfg.snrs_db = {3.5};
    cfg.rate = 64.0 / 155.0;
    cfg.samples = 4000;
    cfg.seed = 21;
    auto cells = quantization_sweep(g, cfg, {10.0}, {0, 22});
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].bits == 0);
    CHECK(cells[1].bits == 22);
    CHECK(cells[0].estimates[0].fer == doctest::Approx(cells[1].estimates[0].fer).epsilon(0.02));
}

TEST_CASE("attribution on a biased Tanner campaign") {
    auto h = fixtures::tanner_code();
    TannerGraph g(h);
    EnumerationOptions opt;
    opt.a_max = 8;
    opt.b_max = 2;
    opt.stop_after = 1;
    auto census = enumerate_sets(h, opt);
    const auto& set = census.by_signature.at({8, 2})[0];

    CampaignConfig cfg;
    cfg.decoder.algorithm = Algorithm::CorrectedMinSum;
    cfg.decoder.clip = 10.0;
    cfg.decoder.max_iters = 50;
    cfg.snrs_db = {5.0};
    cfg.rate = 64.0 / 155.0;
    cfg.bias.target_sets = {set.variables};
    cfg.bias.shift = 1.2;
    cfg.samples = 20000;
    cfg.seed = 5;
    auto est = run_campaign(g, cfg)[0];
    REQUIRE(est.raw_frame_errors > 20);
    long long per_set_total = 0;
    for (auto c : est.per_set_failures) per_set_total += c;
    CHECK(per_set_total == est.raw_frame_errors);
    // deep in the floor the biased set dominates the failure support
    CHECK(static_cast<double>(est.exact_support_failures) / est.raw_frame_errors > 0.5);
}

TEST_CASE("no-events flag distinguishes silence from true zero") {
    auto h = repetition3();
    TannerGraph g(h);
    auto cfg = toy_campaign(12.0, 0.0, 200, 17);  // very high SNR, tiny budget
    auto est = run_campaign(g, cfg)[0];
    CHECK(est.no_events);
    CHECK(est.fer == 0.0);
    CHECK(est.raw_frame_errors == 0);
}

TEST_CASE("campaign config validation") {
    auto h = repetition3();
    TannerGraph g(h);
    auto cfg = toy_campaign(4.0, -1.0, 100, 1);
    CHECK_THROWS(run_campaign(g, cfg));
    cfg = toy_campaign(4.0, 0.5, 100, 1);
    cfg.bias.target_sets = {{0, 99}};
    CHECK_THROWS(run_campaign(g, cfg));
    cfg = toy_campaign(4.0, 0.5, 0, 1);
    CHECK_THROWS(run_campaign(g, cfg));
}
