#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "floorline/parity_check.hpp"
#include "floorline/rng.hpp"

#include <cstdio>
#include <filesystem>

using namespace floorline;

TEST_CASE("QC build: Tanner 93x155, (3,5) regular") {
    auto h = fixtures::tanner_code();
    CHECK(h.rows() == 93);
    CHECK(h.cols() == 155);
    for (std::size_t c = 0; c < h.cols(); ++c) CHECK(h.col(c).size() == 3);
    for (std::size_t r = 0; r < h.rows(); ++r) CHECK(h.row(r).size() == 5);
}

TEST_CASE("QC build: 1x1 identity case and bad inputs") {
    auto h = build_qc_matrix({{0}}, 1);
    CHECK(h.rows() == 1);
    CHECK(h.cols() == 1);
    CHECK(h.row(0) == std::vector<int>{0});
    CHECK_THROWS(build_qc_matrix({{5}}, 3));   // shift out of range
    CHECK_THROWS(build_qc_matrix({{0}}, 0));   // p = 0
}

TEST_CASE("QC build: block shift semantics, entry (r,c)=1 iff c = r+k mod p") {
    auto h = build_qc_matrix({{2}}, 5);
    for (int r = 0; r < 5; ++r) CHECK(h.row(r) == std::vector<int>{(r + 2) % 5});
}

TEST_CASE("gf2_rank: Tanner rank 91 so k = 64; trivial cases") {
    auto h = fixtures::tanner_code();
    CHECK(gf2_rank(h) == 91);

    std::vector<std::vector<int>> eye(5);
    for (int i = 0; i < 5; ++i) eye[i] = {i};
    CHECK(gf2_rank(SparseParityCheck(5, 5, eye)) == 5);

    std::vector<std::vector<int>> zero(3);
    CHECK(gf2_rank(SparseParityCheck(3, 7, zero)) == 0);
}

TEST_CASE("syndrome and is_codeword") {
    auto h = fixtures::tanner_code();
    std::vector<std::uint8_t> zero(h.cols(), 0);
    CHECK(is_codeword(h, zero));

    SUBCASE("single-1 word gives the matching column of H") {
        std::vector<std::uint8_t> w(h.cols(), 0);
        w[17] = 1;
        auto s = syndrome(h, w);
        for (std::size_t r = 0; r < h.rows(); ++r) {
            bool in_col = std::find(h.col(17).begin(), h.col(17).end(), static_cast<int>(r)) !=
                          h.col(17).end();
            CHECK(s[r] == (in_col ? 1 : 0));
        }
    }
    SUBCASE("length mismatch rejected") {
        CHECK_THROWS(syndrome(h, std::vector<std::uint8_t>(7, 0)));
    }
}

TEST_CASE("nullspace codewords: zero syndrome, weight >= 20, QC shift closure") {
    auto h = fixtures::tanner_code();
    auto basis = gf2_nullspace(h);
    CHECK(basis.size() == 64);  // k = n - rank

    Xoshiro256 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::uint8_t> w(h.cols(), 0);
        bool nonzero = false;
        for (const auto& b : basis)
            if (rng() & 1) {
                for (std::size_t j = 0; j < w.size(); ++j) w[j] ^= b[j];
            }
        int weight = 0;
        for (auto bit : w) weight += bit;
        if (weight == 0) continue;
        nonzero = true;
        CHECK(is_codeword(h, w));
        CHECK(weight >= 20);  // published minimum distance

        // block-circulant property: rotating every length-31 segment by one
        // maps codewords to codewords
        std::vector<std::uint8_t> rotated(w.size());
        for (std::size_t j = 0; j < w.size(); ++j) {
            std::size_t block = j / 31, off = j % 31;
            rotated[block * 31 + (off + 1) % 31] = w[j];
        }
        CHECK(is_codeword(h, rotated));
        CHECK(nonzero);
    }
}

TEST_CASE("girth: Tanner = 8, 2x2 all-ones = 4, single column acyclic") {
    CHECK(girth(fixtures::tanner_code()) == 8);

    SparseParityCheck allones(2, 2, {{0, 1}, {0, 1}});
    CHECK(girth(allones) == 4);

    // a single-column matrix is a star: no cycle at all
    SparseParityCheck column(3, 1, {{0}, {0}, {0}});
    CHECK(girth(column) == kGirthInfinite);
}

TEST_CASE("alist round-trip and malformed input") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "floorline_alist_test";
    fs::create_directories(dir);

    SUBCASE("Tanner round-trip preserves supports") {
        auto h = fixtures::tanner_code();
        auto path = (dir / "tanner.alist").string();
        save_alist(h, path);
        auto g = load_alist(path);
        CHECK(g.rows() == h.rows());
        CHECK(g.cols() == h.cols());
        for (std::size_t r = 0; r < h.rows(); ++r) CHECK(g.row(r) == h.row(r));
    }
    SUBCASE("(6,32) proxy: 384x2048, column weight 6, row weight 32") {
        auto h = fixtures::ieee_proxy_code();
        CHECK(h.rows() == 384);
        CHECK(h.cols() == 2048);
        auto path = (dir / "proxy.alist").string();
        save_alist(h, path);
        auto g = load_alist(path);
        for (std::size_t c = 0; c < g.cols(); ++c) CHECK(g.col(c).size() == 6);
        for (std::size_t r = 0; r < g.rows(); ++r) CHECK(g.row(r).size() == 32);
    }
    SUBCASE("neighbor index beyond n is a parse error") {
        auto path = (dir / "bad.alist").string();
        FILE* f = fopen(path.c_str(), "w");
        fputs("2 1\n1 2\n1 1\n2\n9 2\n1 2\n", f);  // row neighbor 9 > n = 2... column list holds 9
        fclose(f);
        CHECK_THROWS(load_alist(path));
    }
    SUBCASE("duplicate neighbor is rejected") {
        auto path = (dir / "dup.alist").string();
        FILE* f = fopen(path.c_str(), "w");
        // n=2 m=1, column degrees 1 1, row degree 2, but row lists variable 1 twice
        fputs("2 1\n1 2\n1 1\n2\n1\n1\n1 1\n", f);
        fclose(f);
        CHECK_THROWS(load_alist(path));
    }
}

TEST_CASE("transpose consistency holds on construction") {
    auto h = fixtures::tanner_code();
    for (std::size_t r = 0; r < h.rows(); ++r)
        for (int c : h.row(r)) {
            const auto& col = h.col(c);
            CHECK(std::find(col.begin(), col.end(), static_cast<int>(r)) != col.end());
        }
    std::size_t total = 0;
    for (std::size_t c = 0; c < h.cols(); ++c) total += h.col(c).size();
    CHECK(total == h.num_edges());
}

TEST_CASE("TannerGraph edge ids are a bijection") {
    auto h = fixtures::tanner_code();
    TannerGraph g(h);
    CHECK(g.num_edges() == h.num_edges());
    std::set<std::pair<int, int>> seen;
    for (std::size_t e = 0; e < g.num_edges(); ++e)
        CHECK(seen.insert({g.edge_check(e), g.edge_var(e)}).second);
}
