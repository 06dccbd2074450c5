#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "parcnot/synth_ancilla.hpp"
#include "support.hpp"

using namespace parcnot;
namespace ts = testing_support;

namespace {

F2Matrix random_block(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    F2Matrix y(rows, cols);
    for (std::size_t i = 0; i < rows; i++) {
        for (std::size_t j = 0; j < cols; j++) y.set(i, j, rng() & 1);
    }
    return y;
}

std::vector<Wire> span(std::size_t begin, std::size_t count) {
    std::vector<Wire> w(count);
    for (std::size_t i = 0; i < count; i++) w[i] = static_cast<Wire>(begin + i);
    return w;
}

// Checks "target[i] ^= sum_j y[i,j] source[j]" with every other wire fixed, for inputs whose
// scratch wires (those at or above `clean_from`) start at zero: only the clean columns are
// constrained, but every row, scratch included, must come back.
::testing::AssertionResult adds_exactly(const Circuit &c, const F2Matrix &y, const std::vector<Wire> &src,
                                        const std::vector<Wire> &tgt, std::size_t clean_from) {
    F2Matrix e = F2Matrix::identity(c.wires());
    for (std::size_t i = 0; i < y.rows(); i++) {
        for (std::size_t j = 0; j < y.cols(); j++) {
            if (y.get(i, j)) e.set(tgt[i], src[j], !e.get(tgt[i], src[j]));
        }
    }
    F2Matrix got = simulate_to_matrix(c);
    for (std::size_t i = 0; i < c.wires(); i++) {
        for (std::size_t j = 0; j < clean_from; j++) {
            if (got.get(i, j) != e.get(i, j)) {
                return ::testing::AssertionFailure() << "entry (" << i << ", " << j << ") differs";
            }
        }
    }
    return ::testing::AssertionSuccess();
}

}  // namespace

TEST(Layout, Regions) {
    AncillaLayout l = AncillaLayout::make(256, 2);
    EXPECT_EQ(l.total_wires(), 2 * 256 + 6 * 256);
    EXPECT_EQ(l.ancillae(), 7u * 256);
    EXPECT_EQ(l.mirror(0), 256u);
    EXPECT_EQ(l.scratch(1).front(), 2 * 256 + 3 * 256u);
    EXPECT_EQ(l.accumulator(1).back(), l.total_wires() - 1);
    EXPECT_FALSE(l.clamped);
    EXPECT_THROW(AncillaLayout::make(0, 1), LayoutError);
    EXPECT_THROW(AncillaLayout::make(8, 0), LayoutError);
}

TEST(Layout, ClampsLargeScale) {
    EXPECT_EQ(AncillaLayout::max_scale(256), 4u);
    EXPECT_EQ(AncillaLayout::max_scale(1024), 10u);
    EXPECT_EQ(AncillaLayout::max_scale(16), 1u);
    AncillaLayout l = AncillaLayout::make(256, 9);
    EXPECT_TRUE(l.clamped);
    EXPECT_EQ(l.s, 4u);
    AncillaLayout bad{256, 9, false};
    EXPECT_THROW(bad.validate(), LayoutError);
}

TEST(Layout, GroupBits) {
    EXPECT_EQ(ancilla_group_bits(2), 1u);
    EXPECT_EQ(ancilla_group_bits(16), 2u);
    EXPECT_EQ(ancilla_group_bits(255), 3u);
    EXPECT_EQ(ancilla_group_bits(256), 4u);
    EXPECT_EQ(ancilla_group_bits(1024), 5u);
}

TEST(GenSparse, EmptyAndSingle) {
    auto src = span(0, 4), tgt = span(4, 6), scr = span(10, 8);
    F2Matrix zero(6, 4);
    EXPECT_EQ(gen_sparse(zero, 0, src, tgt, scr, 18).depth(), 0u);
    F2Matrix one(6, 4);
    one.set(3, 2, true);
    Circuit c = gen_sparse(one, 1, src, tgt, scr, 18);
    EXPECT_LE(c.depth(), 3u);
    EXPECT_TRUE(adds_exactly(c, one, src, tgt, 10));
}

TEST(GenSparse, RandomWithinBudget) {
    auto src = span(0, 5), tgt = span(5, 40), scr = span(45, 200);
    for (std::uint64_t seed = 0; seed < 8; seed++) {
        F2Matrix y = random_block(40, 5, seed);
        std::size_t ones = 0;
        for (std::size_t j = 0; j < 5; j++) ones += y.col_weight(j);
        Circuit c = gen_sparse(y, ones, src, tgt, scr, 245);
        EXPECT_TRUE(adds_exactly(c, y, src, tgt, 45));
        // Doubling out, one layer per bit, doubling back.
        EXPECT_LE(c.depth(), 2 * 6 + 5u);
        EXPECT_THROW(gen_sparse(y, ones - 1, src, tgt, scr, 245), BudgetExceeded);
    }
}

TEST(GenYcol, ExactAndFewMatchings) {
    for (std::size_t n : {16u, 64u, 256u}) {
        std::size_t k = ancilla_group_bits(n);
        std::size_t cols = 2 * k * k;
        auto src = span(0, cols), tgt = span(n, n), scr = span(2 * n, 2 * n);
        std::size_t wires = 4 * n;
        for (std::uint64_t seed = 0; seed < 3; seed++) {
            F2Matrix y = random_block(n, cols, seed + n);
            YcolFragment f = gen_ycol_phases(y, k, src, tgt, scr, wires);
            EXPECT_TRUE(adds_exactly(f.full(), y, src, tgt, 2 * n));
            EXPECT_LE(f.matchings, 2 * static_cast<std::size_t>(std::ceil(std::log2(n))));
            EXPECT_LE(f.plan.extra_rows(), n);
            // build then restore is the identity, and apply is an involution.
            EXPECT_TRUE(simulate_to_matrix(concat(f.build, f.restore)).is_identity());
            EXPECT_TRUE(simulate_to_matrix(concat(f.apply, f.apply)).is_identity());
        }
    }
}

TEST(GenYcol, RejectsTooManyGroups) {
    auto src = span(0, 9), tgt = span(9, 16), scr = span(25, 32);
    EXPECT_THROW(gen_ycol(random_block(16, 9, 1), 2, src, tgt, scr, 57), LayoutError);
}

TEST(GenScols, MultiplePiecesRestoreWorkRegion) {
    const std::size_t n = 256;
    for (std::size_t s : {2u, 4u}) {
        AncillaLayout l = AncillaLayout::make(n, s);
        std::size_t k = ancilla_group_bits(n);
        std::size_t cols = s * 2 * k * k - 3;  // last piece ragged
        auto src = span(0, cols);
        F2Matrix y = random_block(n, cols, s);
        Circuit c = gen_scols(y, l, src, l.mirror_wires());
        EXPECT_TRUE(adds_exactly(c, y, src, l.mirror_wires(), 2 * n));
        EXPECT_TRUE(ts::layers_disjoint(c));
    }
}

TEST(EmbedM, VectorSimulation) {
    const std::size_t n = 64;
    F2Matrix m = random_gl(n, 4);
    AncillaLayout l = AncillaLayout::make(n, 1);
    Circuit c = embed_m(m, l);
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; trial++) {
        std::vector<std::uint8_t> x(l.total_wires(), 0);
        for (std::size_t i = 0; i < n; i++) x[i] = rng() & 1;
        auto y = ts::naive_run(c, x);
        auto want = ts::naive_apply(m, std::vector<std::uint8_t>(x.begin(), x.begin() + n));
        for (std::size_t i = 0; i < n; i++) {
            ASSERT_EQ(y[i], x[i]);
            ASSERT_EQ(y[n + i], want[i]);
        }
        for (std::size_t i = 2 * n; i < y.size(); i++) ASSERT_EQ(y[i], 0);
    }
}

TEST(SynthAncilla, ExactAtEachScale) {
    const std::size_t n = 256;
    std::size_t prev = static_cast<std::size_t>(-1);
    for (std::size_t s : {1u, 2u, 4u}) {
        F2Matrix m = random_gl(n, 11);
        Circuit c = synth_with_ancillae(m, s);
        EXPECT_EQ(c.data(), n);
        EXPECT_EQ(c.ancillae(), (3 * s + 1) * n);
        ASSERT_TRUE(verify_implements(c, m).ok) << s;
        EXPECT_LE(c.depth(), prev);
        prev = c.depth();
    }
}

TEST(SynthAncilla, SmallSizes) {
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 16u, 17u}) {
        F2Matrix m = random_gl(n, n);
        Circuit c = synth_with_ancillae(m, 1);
        ASSERT_TRUE(verify_implements(c, m).ok) << n;
        EXPECT_EQ(c.ancillae(), 4 * n);
    }
}

TEST(SynthAncilla, RejectsSingular) {
    EXPECT_THROW(synth_with_ancillae(F2Matrix(4, 4), 1), SingularMatrix);
}
