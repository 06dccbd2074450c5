#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "parcnot/circuit.hpp"
#include "parcnot/errors.hpp"
#include "parcnot/f2matrix.hpp"
#include "parcnot/layby.hpp"
#include "parcnot/matching.hpp"
#include "parcnot/traversal.hpp"

namespace parcnot {

namespace detail {

/// Clears the strictly lower part of rows [lo, hi) of `w` one anti-diagonal at a time. All entries
/// (r, c) with r + c fixed form one layer: row c is already e_c when used, and no row is both a
/// source and a target in the same layer. Emits at most 2(hi-lo)-3 layers into `out`.
inline void staircase_lower_inplace(F2Matrix &w, std::size_t lo, std::size_t hi, Circuit &out) {
    std::size_t first_word = lo / F2Matrix::kWordBits;
    std::vector<CnotGate> gates;
    for (std::size_t s = 2 * lo + 1; s + 2 < 2 * hi; s++) {
        gates.clear();
        // r + c = s with lo <= c < r < hi.
        std::size_t c_min = (s + 1 > hi) ? s + 1 - hi : 0;
        c_min = std::max(c_min, lo);
        for (std::size_t c = c_min; 2 * c < s; c++) {
            std::size_t r = s - c;
            if (w.get(r, c)) {
                gates.push_back({static_cast<Wire>(c), static_cast<Wire>(r)});
            }
        }
        for (const auto &g : gates) {
            w.xor_row_from(g.target, g.control, first_word);
        }
        out.push_layer(Layer(gates));
    }
}

/// Upper-triangular mirror: anti-diagonals are processed from the bottom-right corner inwards.
inline void staircase_upper_inplace(F2Matrix &w, std::size_t lo, std::size_t hi, Circuit &out) {
    std::size_t first_word = lo / F2Matrix::kWordBits;
    std::vector<CnotGate> gates;
    if (hi - lo < 2) {
        return;
    }
    for (std::size_t s = 2 * hi - 3; s >= 2 * lo + 1; s--) {
        gates.clear();
        // r + c = s with lo <= r < c < hi.
        std::size_t r_min = (s + 1 > hi) ? s + 1 - hi : 0;
        r_min = std::max(r_min, lo);
        for (std::size_t r = r_min; 2 * r < s; r++) {
            std::size_t c = s - r;
            if (w.get(r, c)) {
                gates.push_back({static_cast<Wire>(c), static_cast<Wire>(r)});
            }
        }
        for (const auto &g : gates) {
            w.xor_row_from(g.target, g.control, first_word);
        }
        out.push_layer(Layer(gates));
    }
}

}  // namespace detail

/// Circuit E with E * l = I for unit lower triangular l (depth <= 2n - 3).
inline Circuit staircase_lower(const F2Matrix &l) {
    if (!l.is_unit_lower_triangular()) {
        throw NotTriangular("staircase_lower: matrix is not unit lower triangular");
    }
    F2Matrix w = l;
    Circuit out(l.rows());
    detail::staircase_lower_inplace(w, 0, l.rows(), out);
    return out;
}

/// Circuit E with E * u = I for unit upper triangular u (depth <= 2n - 3).
inline Circuit staircase_upper(const F2Matrix &u) {
    if (!u.is_unit_upper_triangular()) {
        throw NotTriangular("staircase_upper: matrix is not unit upper triangular");
    }
    F2Matrix w = u;
    Circuit out(u.rows());
    detail::staircase_upper_inplace(w, 0, u.rows(), out);
    return out;
}

/// Circuit whose matrix is permutation_matrix(perm), i.e. wire i ends up holding input perm[i].
/// Each cycle is split into two involutions and each involution is a layer of disjoint 3-CNOT swaps.
inline Circuit permutation_layers(const std::vector<std::size_t> &perm) {
    const std::size_t n = perm.size();
    std::vector<bool> seen(n, false);
    for (std::size_t p : perm) {
        if (p >= n || seen[p]) {
            throw DimensionMismatch("permutation_layers: not a permutation");
        }
        seen[p] = true;
    }
    // first: a_j <-> a_{-j}; second: a_j <-> a_{1-j}, for each cycle a_0 -> a_1 -> ... of perm.
    std::vector<std::pair<Wire, Wire>> first, second;
    std::fill(seen.begin(), seen.end(), false);
    std::vector<std::size_t> cyc;
    for (std::size_t s = 0; s < n; s++) {
        if (seen[s]) {
            continue;
        }
        cyc.clear();
        for (std::size_t x = s; !seen[x]; x = perm[x]) {
            seen[x] = true;
            cyc.push_back(x);
        }
        std::size_t len = cyc.size();
        if (len == 1) {
            continue;
        }
        for (std::size_t j = 1; 2 * j < len; j++) {
            first.push_back({static_cast<Wire>(cyc[j]), static_cast<Wire>(cyc[len - j])});
        }
        for (std::size_t j = 1; 2 * j <= len; j++) {
            // a_j <-> a_{1-j}; j ranges over the half with j > 1 - j (mod len).
            std::size_t partner = (len + 1 - j) % len;
            if (partner != j) {
                second.push_back({static_cast<Wire>(cyc[j]), static_cast<Wire>(cyc[partner])});
            }
        }
    }
    Circuit out(n);
    auto swaps = [&](const std::vector<std::pair<Wire, Wire>> &pairs) {
        std::vector<CnotGate> ab, ba;
        for (auto [a, b] : pairs) {
            ab.push_back({a, b});
            ba.push_back({b, a});
        }
        out.push_layer(Layer(ab));
        out.push_layer(Layer(ba));
        out.push_layer(Layer(ab));
    };
    // Matrix of (second swaps, then first swaps) is P_first * P_second = P_{second o first}.
    swaps(second);
    swaps(first);
    return out;
}

/// Depth <= 4n synthesis: m = P L U, each triangular factor by a staircase.
inline Circuit synth_simple(const F2Matrix &m) {
    if (!m.square()) {
        throw DimensionMismatch("synth_simple: matrix is not square");
    }
    PluFactors f = plu_decompose(m);
    Circuit cu = invert_circuit(staircase_upper(f.upper));
    Circuit cl = invert_circuit(staircase_lower(f.lower));
    Circuit cp = permutation_layers(f.perm);
    return compact_layers(concat(concat(cu, cl), cp));
}

enum class WalkKind {
    cyclic,      // powers of cyclic_traversal(k): one layer per stamp
    listed,  // row_traversal_sequence(k), transitions synthesized with synth_simple
};

enum class LaybyUse {
    automatic,  // only for strips whose nonzero values already exceed twice the occurrence limit
    always,
};

struct DncOptions {
    std::size_t base = 64;  // sub-problems of at most this size use the staircase
    WalkKind walk = WalkKind::cyclic;
    LaybyUse layby = LaybyUse::automatic;
    std::uint64_t seed = 0;
};

/// Counters filled in by the divide-and-conquer eliminator, for benchmarking.
struct DncStats {
    std::size_t combines = 0;
    std::size_t stamps = 0;
    std::size_t transition_layers = 0;
    std::size_t matching_layers = 0;
    std::size_t laybys = 0;
    std::size_t max_layby_occurrence = 0;
};

namespace detail {

/// One position of a walk of the k x k bottom blocks. Logical row s (the one strip s reads) sits in
/// physical row phys_of[s]; `move` takes the physical state of the previous position to this one.
struct WalkStep {
    std::vector<std::uint32_t> logical;
    std::vector<std::uint32_t> phys_of;
    std::vector<std::uint32_t> phys;
    Circuit move;
};

inline std::vector<std::uint32_t> identity_rows(std::size_t k) {
    std::vector<std::uint32_t> rows(k);
    for (std::size_t i = 0; i < k; i++) {
        rows[i] = 1u << i;
    }
    return rows;
}

inline std::vector<std::uint32_t> invert_rows(const std::vector<std::uint32_t> &rows, std::size_t k) {
    F2Matrix inv = invert(matrix_from_row_bits(rows, k));
    std::vector<std::uint32_t> out(k);
    for (std::size_t i = 0; i < k; i++) {
        out[i] = row_bits(inv, i);
    }
    return out;
}

/// Circuit on k wires whose matrix is `rows` (as a k x k matrix).
inline Circuit small_circuit(const std::vector<std::uint32_t> &rows, std::size_t k) {
    F2Matrix d = matrix_from_row_bits(rows, k);
    if (d.is_identity()) {
        return Circuit(k);
    }
    return synth_simple(d);
}

/// Walk positions 1..T; position T has logical matrix I.
inline std::vector<WalkStep> build_walk(std::size_t k, WalkKind kind) {
    std::vector<WalkStep> walk;
    std::vector<std::uint32_t> phys = identity_rows(k), phys_of(k);
    for (std::size_t i = 0; i < k; i++) {
        phys_of[i] = static_cast<std::uint32_t>(i);
    }
    if (kind == WalkKind::listed) {
        for (const auto &x : row_traversal_sequence(k).mats) {
            std::vector<std::uint32_t> next(k);
            for (std::size_t i = 0; i < k; i++) {
                next[i] = row_bits(x, i);
            }
            Circuit move = small_circuit(mul_row_bits(next, invert_rows(phys, k)), k);
            phys = next;
            walk.push_back({next, phys_of, phys, std::move(move)});
        }
        return walk;
    }
    CyclicTraversal ct = cyclic_traversal(k);
    std::vector<std::uint32_t> q = ct.matrix_rows(), logical = identity_rows(k);
    for (std::size_t t = 0; t < ct.period(); t++) {
        Circuit move(k);
        std::vector<CnotGate> gates;
        for (const auto &g : ct.layer) {
            gates.push_back({phys_of[g.control], phys_of[g.target]});
            phys[phys_of[g.target]] ^= phys[phys_of[g.control]];
        }
        move.push_layer(Layer(gates));
        std::vector<std::uint32_t> next_of(k);
        for (std::size_t s = 0; s < k; s++) {
            next_of[s] = phys_of[ct.perm[s]];
        }
        phys_of = next_of;
        logical = mul_row_bits(q, logical);
        for (std::size_t s = 0; s < k; s++) {
            if (phys[phys_of[s]] != logical[s]) {
                throw std::logic_error("build_walk: relabelling out of sync");
            }
        }
        walk.push_back({logical, phys_of, phys, std::move(move)});
    }
    return walk;
}

inline const std::vector<WalkStep> &cached_walk(std::size_t k, WalkKind kind) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<std::vector<WalkStep>>> cache(2 * 17);
    std::lock_guard<std::mutex> lock(mu);
    auto &slot = cache[2 * k + (kind == WalkKind::listed ? 1 : 0)];
    if (!slot) {
        slot = std::make_unique<std::vector<WalkStep>>(build_walk(k, kind));
    }
    return *slot;
}

inline Circuit shallower(Circuit a, Circuit b) {
    a = compact_layers(a);
    b = compact_layers(b);
    return b.depth() < a.depth() ? b : a;
}

class DncEliminator {
public:
    DncEliminator(F2Matrix &w, const DncOptions &opt, DncStats *stats)
        : w_(w), opt_(opt), stats_(stats), n_(w.rows()) {}

    Circuit run(std::size_t lo, std::size_t hi) {
        Circuit out(n_);
        std::size_t size = hi - lo;
        if (size <= std::max<std::size_t>(opt_.base, 2)) {
            staircase_upper_inplace(w_, lo, hi, out);
            return out;
        }
        std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::log2(double(size)) / 2)));
        std::size_t h2 = k * ((size / 2) / k);
        std::size_t mid = hi - h2;
        Circuit top = run(lo, mid);
        Circuit bottom = run(mid, hi);
        out = merge_independent_schedules(top, bottom);
        combine(lo, mid, hi, k, out);
        return out;
    }

private:
    F2Matrix &w_;
    const DncOptions &opt_;
    DncStats *stats_;
    std::size_t n_;

    void apply_layer(std::vector<CnotGate> &gates, std::size_t lo, Circuit &out) {
        std::size_t first_word = lo / F2Matrix::kWordBits;
        for (const auto &g : gates) {
            w_.xor_row_from(g.target, g.control, first_word);
        }
        out.push_layer(Layer(std::move(gates)));
        gates.clear();
    }

    // Runs a k-wire circuit on every bottom block at once.
    void replicate(const Circuit &small, std::size_t mid, std::size_t blocks, std::size_t k, std::size_t lo,
                   Circuit &out) {
        std::vector<CnotGate> gates;
        for (const auto &l : small.layers()) {
            for (std::size_t b = 0; b < blocks; b++) {
                Wire base = static_cast<Wire>(mid + b * k);
                for (const auto &g : l.gates()) {
                    gates.push_back({base + g.control, base + g.target});
                }
            }
            apply_layer(gates, lo, out);
            if (stats_) {
                stats_->transition_layers++;
            }
        }
    }

    /// Rows [lo, mid) hold [I | A] and rows [mid, hi) hold [0 | I] on columns [lo, hi). Clears A.
    void combine(std::size_t lo, std::size_t mid, std::size_t hi, std::size_t k, Circuit &out) {
        const std::size_t h1 = mid - lo;
        const std::size_t blocks = (hi - mid) / k;
        const std::size_t nv = std::size_t{1} << k;
        const std::size_t strip_rows = (h1 + k - 1) / k;
        const std::size_t strips = (h1 + strip_rows - 1) / strip_rows;
        if (stats_) {
            stats_->combines++;
        }

        // Super-entries of A: row r (relative to lo), block j.
        SuperMatrix a(h1, blocks, k);
        for (std::size_t r = 0; r < h1; r++) {
            for (std::size_t j = 0; j < blocks; j++) {
                std::uint16_t v = 0;
                for (std::size_t b = 0; b < k; b++) {
                    v |= static_cast<std::uint16_t>(w_.get(lo + r, mid + j * k + b)) << b;
                }
                a.at(r, j) = v;
            }
        }

        // bucket[s * nv + v] = (row in strip, block) pairs that must receive v. With a layby B a
        // nonzero entry receives C = A + B and B; adding both in either order clears it.
        std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> bucket(strips * nv);
        for (std::size_t s = 0; s < strips; s++) {
            std::size_t r0 = s * strip_rows, r1 = std::min(h1, r0 + strip_rows);
            SuperMatrix strip(r1 - r0, blocks, k);
            std::copy(a.values.begin() + static_cast<std::ptrdiff_t>(r0 * blocks),
                      a.values.begin() + static_cast<std::ptrdiff_t>(r1 * blocks), strip.values.begin());
            std::size_t limit = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::sqrt(std::exp(1.0)) * double(std::max(r1 - r0, blocks)) / double(nv)));
            bool use_layby = opt_.layby == LaybyUse::always || nonzero_occurrence(strip) > 2 * limit;
            SuperMatrix bpart(r1 - r0, blocks, k), cpart = strip;
            if (use_layby) {
                LaybyOptions lopt;
                lopt.n_ctx = hi - lo;
                lopt.bound = limit;
                lopt.seed = opt_.seed ^ (lo * 0x9E3779B97F4A7C15ULL) ^ s;
                lopt.throw_on_failure = false;
                LaybyPair lp = find_layby(strip, lopt);
                if (stats_) {
                    stats_->laybys++;
                    stats_->max_layby_occurrence =
                        std::max({stats_->max_layby_occurrence, max_occurrence(lp.b), max_occurrence(lp.c_mat)});
                }
                bpart = std::move(lp.b);
                cpart = std::move(lp.c_mat);
            }
            for (std::size_t r = 0; r < r1 - r0; r++) {
                for (std::size_t j = 0; j < blocks; j++) {
                    if (strip.at(r, j) == 0) {
                        continue;
                    }
                    for (std::uint16_t v : {cpart.at(r, j), bpart.at(r, j)}) {
                        if (v != 0) {
                            bucket[s * nv + v].push_back(
                                {static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(j)});
                        }
                    }
                }
            }
        }

        const std::vector<WalkStep> &walk = cached_walk(k, opt_.walk);
        std::vector<std::uint32_t> cur = identity_rows(k);
        std::size_t at = 0;  // walk positions 1..T; 0 is the starting identity
        std::vector<CnotGate> gates;
        for (std::size_t t = 1; t <= walk.size(); t++) {
            const WalkStep &step = walk[t - 1];
            std::vector<std::vector<Matching>> per_strip(strips);
            std::size_t depth_here = 0;
            for (std::size_t s = 0; s < strips; s++) {
                auto &edges = bucket[s * nv + step.logical[s]];
                if (edges.empty()) {
                    continue;
                }
                BipartiteGraph g;
                g.left_count = std::min(h1, (s + 1) * strip_rows) - s * strip_rows;
                g.right_count = blocks;
                for (auto [r, j] : edges) {
                    g.add_edge(r, j);
                }
                edges.clear();
                per_strip[s] = decompose_matchings(g);
                depth_here = std::max(depth_here, per_strip[s].size());
            }
            if (depth_here == 0) {
                continue;
            }
            Circuit via(k);
            for (std::size_t u = at + 1; u <= t; u++) {
                via.append(walk[u - 1].move);
            }
            if (t > at + 1) {
                via = shallower(via, small_circuit(mul_row_bits(step.phys, invert_rows(cur, k)), k));
            }
            replicate(via, mid, blocks, k, lo, out);
            cur = step.phys;
            at = t;
            if (stats_) {
                stats_->stamps++;
            }
            for (std::size_t layer = 0; layer < depth_here; layer++) {
                for (std::size_t s = 0; s < strips; s++) {
                    if (layer >= per_strip[s].size()) {
                        continue;
                    }
                    Wire row = step.phys_of[s];
                    for (const auto &e : per_strip[s][layer]) {
                        gates.push_back({static_cast<Wire>(mid + e.right * k + row),
                                         static_cast<Wire>(lo + s * strip_rows + e.left)});
                    }
                }
                apply_layer(gates, lo, out);
                if (stats_) {
                    stats_->matching_layers++;
                }
            }
        }
        // Back to the identity: either finish the walk and undo the final relabelling, or jump.
        Circuit rest(k);
        for (std::size_t u = at + 1; u <= walk.size(); u++) {
            rest.append(walk[u - 1].move);
        }
        std::vector<std::uint32_t> end = walk.empty() ? identity_rows(k) : walk.back().phys;
        rest.append(small_circuit(invert_rows(end, k), k));
        replicate(shallower(rest, small_circuit(invert_rows(cur, k), k)), mid, blocks, k, lo, out);
#ifdef PARCNOT_DNC_TRACE
        if (lo == 0) {
            std::fprintf(stderr, "combine n'=%zu k=%zu depth_after=%zu stamps=%zu trans=%zu match=%zu\n", hi - lo, k,
                         out.depth(), stats_->stamps, stats_->transition_layers, stats_->matching_layers);
        }
#endif
        for (std::size_t r = lo; r < hi; r++) {
            for (std::size_t c = lo; c < hi; c++) {
                if (w_.get(r, c) != (r == c)) {
                    throw std::logic_error("eliminate_upper_dnc: block not reduced to identity");
                }
            }
        }
    }

    static std::size_t nonzero_occurrence(const SuperMatrix &s) {
        std::size_t nv = std::size_t{1} << s.k;
        std::vector<std::size_t> cnt(nv);
        std::size_t best = 0;
        for (std::size_t i = 0; i < s.rows; i++) {
            std::fill(cnt.begin(), cnt.end(), 0);
            for (std::size_t j = 0; j < s.cols; j++) {
                if (s.at(i, j)) {
                    best = std::max(best, ++cnt[s.at(i, j)]);
                }
            }
        }
        for (std::size_t j = 0; j < s.cols; j++) {
            std::fill(cnt.begin(), cnt.end(), 0);
            for (std::size_t i = 0; i < s.rows; i++) {
                if (s.at(i, j)) {
                    best = std::max(best, ++cnt[s.at(i, j)]);
                }
            }
        }
        return best;
    }
};

}  // namespace detail

/// Circuit E with E * u = I for unit upper triangular u, by recursive halving: after both diagonal
/// halves are reduced (in parallel), the top-right block is cleared through a layby using
/// row-traversal sequences on the bottom blocks and one layer per matching.
inline Circuit eliminate_upper_dnc(const F2Matrix &u, const DncOptions &opt = {}, DncStats *stats = nullptr) {
    if (!u.is_unit_upper_triangular()) {
        throw NotTriangular("eliminate_upper_dnc: matrix is not unit upper triangular");
    }
    F2Matrix w = u;
    detail::DncEliminator elim(w, opt, stats);
    return compact_layers(elim.run(0, u.rows()));
}

/// Ancilla-free O(n / log n)-depth synthesis: m = P L U with both triangular factors eliminated by
/// eliminate_upper_dnc (L through the index reversal, which makes it upper triangular).
inline Circuit synth_dnc(const F2Matrix &m, const DncOptions &opt = {}, DncStats *stats = nullptr) {
    if (!m.square()) {
        throw DimensionMismatch("synth_dnc: matrix is not square");
    }
    const std::size_t n = m.rows();
    PluFactors f = plu_decompose(m);
    Circuit cu = invert_circuit(eliminate_upper_dnc(f.upper, opt, stats));
    F2Matrix lr(n, n);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j <= i; j++) {
            if (f.lower.get(i, j)) {
                lr.set(n - 1 - i, n - 1 - j, true);
            }
        }
    }
    std::vector<Wire> rev(n);
    for (std::size_t i = 0; i < n; i++) {
        rev[i] = static_cast<Wire>(n - 1 - i);
    }
    Circuit cl = invert_circuit(relabel(eliminate_upper_dnc(lr, opt, stats), rev, n, n));
    Circuit cp = permutation_layers(f.perm);
    return compact_layers(concat(concat(cu, cl), cp));
}

}  // namespace parcnot
