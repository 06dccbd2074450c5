#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "parcnot/matching.hpp"

using namespace parcnot;

namespace {

BipartiteGraph random_graph(std::size_t nl, std::size_t nr, std::size_t edges, std::size_t cap, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BipartiteGraph g;
    g.left_count = nl;
    g.right_count = nr;
    std::vector<std::size_t> dl(nl, 0), dr(nr, 0);
    for (std::size_t tries = 0; g.edges.size() < edges && tries < 50 * edges; tries++) {
        std::size_t a = rng() % nl, b = rng() % nr;
        if (dl[a] < cap && dr[b] < cap) {
            dl[a]++;
            dr[b]++;
            g.add_edge(a, b, g.edges.size());
        }
    }
    return g;
}

// Each edge (by tag) lands in exactly one class, and no class reuses a vertex.
void expect_partition(const BipartiteGraph &g, const std::vector<Matching> &ms) {
    std::vector<int> seen(g.edges.size(), 0);
    for (const auto &m : ms) {
        std::set<std::size_t> l, r;
        for (const auto &e : m) {
            EXPECT_TRUE(l.insert(e.left).second);
            EXPECT_TRUE(r.insert(e.right).second);
            ASSERT_LT(e.tag, g.edges.size());
            EXPECT_EQ(g.edges[e.tag], e);
            seen[e.tag]++;
        }
    }
    for (int s : seen) EXPECT_EQ(s, 1);
}

}  // namespace

TEST(Matching, MaxDegree) {
    BipartiteGraph g;
    g.left_count = g.right_count = 3;
    EXPECT_EQ(max_degree(g), 0u);
    g.add_edge(0, 0);
    g.add_edge(0, 1);
    g.add_edge(1, 0);
    g.add_edge(1, 1);
    EXPECT_EQ(max_degree(g), 2u);
    BipartiteGraph star;
    star.left_count = 1;
    star.right_count = 7;
    for (std::size_t i = 0; i < 7; i++) star.add_edge(0, i);
    EXPECT_EQ(max_degree(star), 7u);
    EXPECT_THROW(star.add_edge(1, 0), DimensionMismatch);
}

TEST(Matching, Trivial) {
    BipartiteGraph g;
    g.left_count = g.right_count = 2;
    EXPECT_TRUE(decompose_matchings(g).empty());
    g.add_edge(1, 0, 9);
    auto ms = decompose_matchings(g);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0][0].tag, 9u);
}

TEST(Matching, CompleteTwoByTwo) {
    BipartiteGraph g;
    g.left_count = g.right_count = 2;
    for (std::size_t i = 0; i < 4; i++) g.add_edge(i / 2, i % 2, i);
    auto ms = decompose_matchings(g);
    ASSERT_EQ(ms.size(), 2u);
    EXPECT_EQ(ms[0].size(), 2u);
    EXPECT_EQ(ms[1].size(), 2u);
    expect_partition(g, ms);
}

TEST(Matching, ParallelEdges) {
    BipartiteGraph g;
    g.left_count = g.right_count = 2;
    for (int i = 0; i < 5; i++) g.add_edge(0, 1, i);
    g.add_edge(1, 0, 5);
    auto ms = decompose_matchings(g);
    EXPECT_EQ(ms.size(), 5u);
    expect_partition(g, ms);
}

TEST(Matching, Unbalanced) {
    BipartiteGraph g = random_graph(300, 17, 2000, 1000, 4);
    auto ms = decompose_matchings(g);
    EXPECT_EQ(ms.size(), max_degree(g));
    expect_partition(g, ms);
}

TEST(Matching, RandomDenseDegreeTwelve) {
    BipartiteGraph g = random_graph(200, 200, 2000, 12, 1);
    ASSERT_EQ(max_degree(g), 12u);
    auto ms = decompose_matchings(g);
    EXPECT_EQ(ms.size(), 12u);
    expect_partition(g, ms);
}

class MatchingDegree : public ::testing::TestWithParam<std::size_t> {};

TEST_P(MatchingDegree, ExactlyDeltaClasses) {
    std::size_t cap = GetParam();
    for (std::uint64_t seed = 0; seed < 3; seed++) {
        BipartiteGraph g = random_graph(64, 80, 64 * cap, cap, seed * 131 + cap);
        auto ms = decompose_matchings(g);
        EXPECT_EQ(ms.size(), max_degree(g));
        expect_partition(g, ms);
    }
}

INSTANTIATE_TEST_SUITE_P(Degrees, MatchingDegree, ::testing::Values(1, 2, 3, 5, 8, 13, 16, 31, 32, 33, 64));
