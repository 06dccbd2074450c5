#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "parcnot/circuit.hpp"
#include "parcnot/synth_free.hpp"
#include "support.hpp"

using namespace parcnot;
namespace ts = testing_support;

namespace {

Circuit random_circuit(std::size_t wires, std::size_t depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Circuit c(wires);
    std::vector<Wire> w(wires);
    for (std::size_t i = 0; i < wires; i++) w[i] = static_cast<Wire>(i);
    for (std::size_t d = 0; d < depth; d++) {
        std::shuffle(w.begin(), w.end(), rng);
        std::vector<CnotGate> gates;
        for (std::size_t i = 0; i + 1 < wires; i += 2) {
            if (rng() % 3) gates.push_back({w[i], w[i + 1]});
        }
        if (gates.empty()) gates.push_back({w[0], w[1]});
        c.push_layer(std::move(gates));
    }
    return c;
}

}  // namespace

TEST(Layer, RejectsCollisions) {
    EXPECT_THROW(Layer({{0, 0}}), MalformedLayer);
    EXPECT_THROW(Layer({{0, 1}, {1, 2}}), MalformedLayer);
    EXPECT_THROW(Layer({{0, 1}, {2, 0}}), MalformedLayer);
    EXPECT_NO_THROW(Layer({{0, 1}, {2, 3}}));
    Circuit c(2);
    EXPECT_THROW(c.push_layer({{0, 2}}), MalformedLayer);
}

TEST(Circuit, SimulateEmpty) {
    EXPECT_TRUE(simulate_to_matrix(Circuit(3)).is_identity());
}

TEST(Circuit, SimulateSingleGate) {
    Circuit c(2);
    c.push_layer({{0, 1}});
    EXPECT_EQ(simulate_to_matrix(c), F2Matrix::from_rows({"10", "11"}));
}

TEST(Circuit, SimulateTwoGates) {
    Circuit c(2);
    c.push_layer({{0, 1}});
    c.push_layer({{1, 0}});
    EXPECT_EQ(simulate_to_matrix(c), F2Matrix::from_rows({"01", "11"}));
}

TEST(Circuit, SimulateMatchesNaive) {
    for (std::uint64_t seed = 0; seed < 10; seed++) {
        Circuit c = random_circuit(13, 20, seed);
        EXPECT_EQ(ts::dense(simulate_to_matrix(c)), ts::naive_simulate(c));
    }
}

TEST(Circuit, EmptyLayersDropped) {
    Circuit c(3);
    c.push_layer(std::vector<CnotGate>{});
    EXPECT_EQ(c.depth(), 0u);
    c.push_layer({{0, 1}});
    EXPECT_EQ(c.depth(), 1u);
    EXPECT_EQ(c.size(), 1u);
}

TEST(Circuit, ConcatIsLeftMultiplication) {
    for (std::uint64_t seed = 0; seed < 10; seed++) {
        Circuit a = random_circuit(9, 6, seed), b = random_circuit(9, 7, seed + 50);
        EXPECT_EQ(simulate_to_matrix(concat(a, b)), mat_mul(simulate_to_matrix(b), simulate_to_matrix(a)));
    }
}

TEST(Verify, EmptyCircuitIsIdentity) {
    VerifyReport r = verify_implements(Circuit(4), F2Matrix::identity(4));
    EXPECT_TRUE(r.ok);
}

TEST(Verify, RoundTripThroughSimple) {
    F2Matrix m = random_gl(32, 11);
    EXPECT_TRUE(verify_implements(synth_simple(m), m).ok);
}

TEST(Verify, DirtyAncillaDetected) {
    Circuit c(3, 2);
    c.push_layer({{0, 2}});
    VerifyReport r = verify_implements(c, F2Matrix::identity(2));
    EXPECT_TRUE(r.top_left_match);
    EXPECT_FALSE(r.ancilla_restored);
    EXPECT_FALSE(r.ok);
}

TEST(Verify, AncillaGarbageColumnsAllowed) {
    // Ancilla -> data leaves the ancilla's column dirty, which is invisible for zero ancillae.
    Circuit c(3, 2);
    c.push_layer({{2, 0}});
    EXPECT_TRUE(verify_implements(c, F2Matrix::identity(2)).ok);
}

TEST(Verify, OkImpliesVectorBehaviour) {
    F2Matrix m = random_gl(12, 3);
    std::vector<Wire> map(12);
    for (Wire i = 0; i < 12; i++) map[i] = i;
    // The two borrowing layers cancel, so the ancillae come back clean.
    Circuit d(17, 12);
    d.push_layer({{0, 12}, {1, 13}});
    d.push_layer({{0, 12}, {1, 13}});
    d.append(relabel(synth_simple(m), map, 17, 12));
    ASSERT_TRUE(verify_implements(d, m).ok);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; trial++) {
        std::vector<std::uint8_t> x(17, 0);
        for (std::size_t i = 0; i < 12; i++) x[i] = rng() & 1;
        auto y = ts::naive_run(d, x);
        auto want = ts::naive_apply(m, std::vector<std::uint8_t>(x.begin(), x.begin() + 12));
        for (std::size_t i = 0; i < 12; i++) ASSERT_EQ(y[i], want[i]);
        for (std::size_t i = 12; i < 17; i++) ASSERT_EQ(y[i], 0);
        std::vector<bool> xb(x.begin(), x.end());
        auto yb = simulate_vector(d, xb);
        for (std::size_t i = 0; i < 17; i++) ASSERT_EQ(yb[i], y[i] != 0);
    }
}

TEST(Merge, WithEmpty) {
    Circuit x = random_circuit(6, 4, 1);
    EXPECT_EQ(merge_independent_schedules(x, Circuit(6)), x);
}

TEST(Merge, DisjointUnion) {
    Circuit a(4), b(4);
    a.push_layer({{0, 1}});
    b.push_layer({{2, 3}});
    Circuit m = merge_independent_schedules(a, b);
    EXPECT_EQ(m.depth(), 1u);
    EXPECT_EQ(m.size(), 2u);
}

TEST(Merge, HalvesSimulateToProduct) {
    Circuit a(8), b(8);
    for (int d = 0; d < 3; d++) {
        a.push_layer({{0, 1}, {2, 3}});
        a.push_layer({{3, 0}});
        b.push_layer({{4, 5}, {7, 6}});
    }
    Circuit m = merge_independent_schedules(a, b);
    EXPECT_EQ(m.depth(), std::max(a.depth(), b.depth()));
    EXPECT_EQ(simulate_to_matrix(m), mat_mul(simulate_to_matrix(a), simulate_to_matrix(b)));
    EXPECT_EQ(simulate_to_matrix(m), mat_mul(simulate_to_matrix(b), simulate_to_matrix(a)));
}

TEST(Merge, CollisionThrows) {
    Circuit a(4), b(4);
    a.push_layer({{0, 1}});
    b.push_layer({{1, 2}});
    EXPECT_THROW(merge_independent_schedules(a, b), WireCollision);
}

TEST(Invert, Basics) {
    EXPECT_EQ(invert_circuit(Circuit(3)).depth(), 0u);
    Circuit one(4);
    one.push_layer({{0, 1}, {3, 2}});
    EXPECT_EQ(invert_circuit(one), one);
    EXPECT_TRUE(simulate_to_matrix(concat(one, invert_circuit(one))).is_identity());
    Circuit r = random_circuit(10, 10, 77);
    EXPECT_TRUE(simulate_to_matrix(concat(r, invert_circuit(r))).is_identity());
}

TEST(Compact, PreservesMatrixNeverDeepens) {
    for (std::uint64_t seed = 0; seed < 10; seed++) {
        Circuit c(10);
        std::mt19937_64 rng(seed);
        for (int g = 0; g < 40; g++) {
            Wire a = rng() % 10, b = rng() % 10;
            if (a != b) c.push_layer({{a, b}});
        }
        Circuit k = compact_layers(c);
        EXPECT_LE(k.depth(), c.depth());
        EXPECT_EQ(simulate_to_matrix(k), simulate_to_matrix(c));
        EXPECT_TRUE(ts::layers_disjoint(k));
    }
}

TEST(CircuitText, RoundTrip) {
    Circuit c = random_circuit(11, 5, 3);
    Circuit d(7, 4);
    d.push_layer({{0, 6}, {4, 2}});
    for (const Circuit &x : {c, d}) {
        std::string s = circuit_to_string(x);
        EXPECT_EQ(circuit_from_string(s), x);
    }
    EXPECT_EQ(circuit_to_string(d), "CNOTC v1 wires=7 data=4\n0>6 4>2\n");
}

TEST(CircuitText, CommentsAndBlanks) {
    Circuit c = circuit_from_string("# hi\nCNOTC v1 wires=3 data=3\n\n0>1 # trailing\n\n2>0\n");
    EXPECT_EQ(c.depth(), 2u);
    EXPECT_EQ(c.layers()[1].gates()[0], (CnotGate{2, 0}));
}

TEST(CircuitText, Errors) {
    for (std::string bad : {"", "CNOTC v2 wires=3 data=3\n", "CNOTC v1 wires=3 data=4\n",
                            "CNOTC v1 wires=3 data=3\n0>3\n", "CNOTC v1 wires=3 data=3\n0>1 1>2\n",
                            "CNOTC v1 wires=3 data=3\n0-1\n", "CNOTC v1 wires=3 data=3\n1>1\n"}) {
        EXPECT_ANY_THROW(circuit_from_string(bad)) << bad;
    }
}
