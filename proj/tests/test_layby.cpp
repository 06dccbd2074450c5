#include <gtest/gtest.h>

#include <map>
#include <random>

#include "parcnot/layby.hpp"

using namespace parcnot;

namespace {

SuperMatrix random_strip(std::size_t rows, std::size_t cols, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SuperMatrix s(rows, cols, k);
    for (auto &v : s.values) v = static_cast<std::uint16_t>(rng() & ((1u << k) - 1));
    return s;
}

// Independent recount with ordered maps keyed on (line, value).
std::size_t recount(const SuperMatrix &s) {
    std::map<std::pair<std::size_t, int>, std::size_t> rows, cols;
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.rows; i++) {
        for (std::size_t j = 0; j < s.cols; j++) {
            best = std::max(best, ++rows[{i, s.at(i, j)}]);
            best = std::max(best, ++cols[{j, s.at(i, j)}]);
        }
    }
    return best;
}

}  // namespace

TEST(Layby, BoundValues) {
    EXPECT_EQ(layby_bound(1024), 5u);
    EXPECT_EQ(layby_bound(4096), 8u);
    EXPECT_EQ(layby_bound(256), 3u);
}

TEST(Layby, SuperEntryRoundTrip) {
    F2Matrix m = random_gl(24, 5).block(0, 0, 10, 24);
    SuperMatrix s = super_from_matrix(m, 3);
    EXPECT_EQ(s.cols, 8u);
    EXPECT_EQ(matrix_from_super(s), m);
    EXPECT_THROW(super_from_matrix(m, 5), DimensionMismatch);
}

TEST(Layby, OccurrenceCounting) {
    SuperMatrix s(2, 3, 2);
    s.at(0, 0) = s.at(0, 1) = s.at(0, 2) = 3;
    s.at(1, 1) = 1;
    s.at(1, 2) = 2;
    EXPECT_EQ(max_occurrence(s), 3u);
    EXPECT_EQ(recount(s), 3u);
    s.at(0, 1) = 1;
    EXPECT_EQ(max_occurrence(s), 2u);
    EXPECT_EQ(recount(s), 2u);
}

TEST(Layby, ZeroStrip) {
    SuperMatrix a(342, 341, 6);
    LaybyPair lp = find_layby(a, 4096);
    EXPECT_EQ(lp.c_mat, lp.b);
    EXPECT_LE(recount(lp.b), layby_bound(4096));
}

TEST(Layby, RandomStrips1024) {
    for (std::uint64_t seed = 0; seed < 4; seed++) {
        SuperMatrix a = random_strip(103, 102, 5, seed);
        LaybyPair lp = find_layby(a, 1024);
        EXPECT_EQ(super_xor(lp.b, lp.c_mat), a);
        EXPECT_LE(recount(lp.b), 5u);
        EXPECT_LE(recount(lp.c_mat), 5u);
    }
}

TEST(Layby, RandomStrip4096) {
    SuperMatrix a = random_strip(342, 341, 6, 42);
    LaybyPair lp = find_layby(a, 4096);
    EXPECT_EQ(super_xor(lp.b, lp.c_mat), a);
    EXPECT_LE(recount(lp.b), 8u);
    EXPECT_LE(recount(lp.c_mat), 8u);
}

TEST(Layby, ImpossibleBoundThrows) {
    SuperMatrix a = random_strip(40, 40, 2, 1);
    LaybyOptions opt;
    opt.n_ctx = 1024;
    opt.bound = 2;  // 40 entries over 4 values cannot stay at 2 per line
    EXPECT_THROW(find_layby(a, opt), LaybyFailure);
    opt.throw_on_failure = false;
    EXPECT_NO_THROW(find_layby(a, opt));
}

TEST(Layby, Deterministic) {
    SuperMatrix a = random_strip(60, 60, 4, 3);
    LaybyOptions opt;
    opt.n_ctx = 1024;
    opt.seed = 7;
    EXPECT_EQ(find_layby(a, opt).b, find_layby(a, opt).b);
}
