#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "parcnot/circuit.hpp"
#include "parcnot/errors.hpp"
#include "parcnot/f2matrix.hpp"

namespace parcnot {

/// Row p of `m` (at most 16 columns) as an integer whose bit j is m[p, j].
inline std::uint32_t row_bits(const F2Matrix &m, std::size_t p) {
    return static_cast<std::uint32_t>(m.row(p)[0]);
}

inline F2Matrix matrix_from_row_bits(const std::vector<std::uint32_t> &rows, std::size_t k) {
    F2Matrix m(rows.size(), k);
    for (std::size_t p = 0; p < rows.size(); p++) {
        m.row(p)[0] = rows[p] & ((std::uint64_t{1} << k) - 1);
    }
    return m;
}

/// Invertible k x k matrices ending at I such that, for every row index p, the rows
/// mats[0][p,*], mats[1][p,*], ... visit every nonzero vector of F_2^k.
struct TraversalSequence {
    std::size_t k = 0;
    std::vector<F2Matrix> mats;

    std::size_t length() const { return mats.size(); }
};

inline std::size_t traversal_length(std::size_t k) { return 3 * (std::size_t{1} << (k - 1)) - k + 1; }

namespace detail {

inline bool invertible_rows(const std::vector<std::uint32_t> &rows, std::size_t k) {
    return rank(matrix_from_row_bits(rows, k)) == k;
}

}  // namespace detail

/// For each v (Gray-code order) emits T = I + 1 v^T. When v has odd weight T is singular, so row
/// i (the lowest set bit of v) is replaced to restore invertibility and the displaced row u is
/// visited by an extra matrix V with V[i,*] = u emitted just before T. The sequence ends with I.
inline TraversalSequence row_traversal_sequence(std::size_t k) {
    if (k < 1 || k > 16) {
        throw DimensionMismatch("row_traversal_sequence: k must be in [1, 16]");
    }
    TraversalSequence seq;
    seq.k = k;
    std::uint32_t full = (1u << k) - 1;
    for (std::uint32_t j = 0; j < (1u << k); j++) {
        std::uint32_t v = j ^ (j >> 1);
        std::vector<std::uint32_t> t(k);
        for (std::size_t p = 0; p < k; p++) {
            t[p] = ((1u << p) ^ v) & full;
        }
        if (std::popcount(v) % 2 == 1) {
            std::size_t i = static_cast<std::size_t>(std::countr_zero(v));
            std::uint32_t u = t[i];
            t[i] = 1u << i;
            if (!detail::invertible_rows(t, k)) {
                bool fixed = false;
                for (std::size_t q = 0; q < k && !fixed; q++) {
                    if (q == i) {
                        continue;
                    }
                    t[i] = (1u << i) ^ (1u << q);
                    fixed = detail::invertible_rows(t, k);
                }
                if (!fixed) {
                    throw SingularMatrix("row_traversal_sequence: no invertible completion");
                }
            }
            if (u != 0) {
                // V[i,*] = u; complete the other rows greedily from the standard basis.
                std::vector<std::uint32_t> vrows(k, 0);
                vrows[i] = u;
                std::vector<std::uint32_t> basis;  // reduced rows, for the span test
                auto reduce = [&](std::uint32_t x) {
                    for (std::uint32_t b : basis) {
                        x = std::min(x, x ^ b);
                    }
                    return x;
                };
                auto insert = [&](std::uint32_t x) {
                    x = reduce(x);
                    basis.push_back(x);
                    std::sort(basis.begin(), basis.end(), std::greater<>());
                };
                insert(u);
                std::size_t q = 0;
                for (std::size_t p = 0; p < k; p++) {
                    if (p == i) {
                        continue;
                    }
                    // Prefer e_p so V stays close to I.
                    if (reduce(1u << p) != 0) {
                        vrows[p] = 1u << p;
                    } else {
                        while (reduce(1u << q) == 0) {
                            q++;
                        }
                        vrows[p] = 1u << q;
                    }
                    insert(vrows[p]);
                }
                seq.mats.push_back(matrix_from_row_bits(vrows, k));
            }
        }
        seq.mats.push_back(matrix_from_row_bits(t, k));
    }
    seq.mats.push_back(F2Matrix::identity(k));
    return seq;
}

/// Row-bit product: row i of a * b is the XOR of the rows b[j] selected by the bits of a[i].
inline std::vector<std::uint32_t> mul_row_bits(const std::vector<std::uint32_t> &a,
                                               const std::vector<std::uint32_t> &b) {
    std::vector<std::uint32_t> out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); i++) {
        for (std::uint32_t x = a[i]; x; x &= x - 1) {
            out[i] ^= b[static_cast<std::size_t>(std::countr_zero(x))];
        }
    }
    return out;
}

/// Q = P * L with L one CNOT layer on k wires and P a row permutation (row i of P is e_perm[i]),
/// chosen so the powers Q, Q^2, ..., Q^(2^k - 1) = I form a row-traversal sequence. Applying Q
/// costs one physical layer: P is absorbed by relabelling which physical row holds which logical row.
struct CyclicTraversal {
    std::size_t k = 0;
    std::vector<std::size_t> perm;
    std::vector<CnotGate> layer;

    std::vector<std::uint32_t> matrix_rows() const {
        std::vector<std::uint32_t> l(k), q(k);
        for (std::size_t i = 0; i < k; i++) {
            l[i] = 1u << i;
        }
        for (const auto &g : layer) {
            l[g.target] ^= l[g.control];
        }
        for (std::size_t i = 0; i < k; i++) {
            q[i] = l[perm[i]];
        }
        return q;
    }

    std::size_t period() const { return (std::size_t{1} << k) - 1; }
};

namespace detail {

inline bool powers_traverse(const std::vector<std::uint32_t> &q, std::size_t k) {
    std::size_t period = (std::size_t{1} << k) - 1;
    std::vector<std::uint32_t> x(k);
    for (std::size_t i = 0; i < k; i++) {
        x[i] = 1u << i;
    }
    std::vector<std::vector<bool>> seen(k, std::vector<bool>(std::size_t{1} << k, false));
    std::vector<std::size_t> distinct(k, 0);
    for (std::size_t t = 1; t <= period; t++) {
        x = mul_row_bits(q, x);
        for (std::size_t p = 0; p < k; p++) {
            if (x[p] != 0 && !seen[p][x[p]]) {
                seen[p][x[p]] = true;
                distinct[p]++;
            }
        }
        if (t < period) {
            bool identity = true;
            for (std::size_t p = 0; p < k && identity; p++) {
                identity = x[p] == (1u << p);
            }
            if (identity) {
                return false;
            }
        }
    }
    for (std::size_t p = 0; p < k; p++) {
        if (distinct[p] != period || x[p] != (1u << p)) {
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// Deterministic seeded search over (permutation, layer) pairs; the first valid Q is returned.
inline CyclicTraversal cyclic_traversal(std::size_t k) {
    if (k < 1 || k > 16) {
        throw DimensionMismatch("cyclic_traversal: k must be in [1, 16]");
    }
    CyclicTraversal ct;
    ct.k = k;
    ct.perm.resize(k);
    for (std::size_t i = 0; i < k; i++) {
        ct.perm[i] = i;
    }
    if (k == 1) {
        return ct;
    }
    std::mt19937_64 rng(k);
    std::vector<std::size_t> wires(k);
    for (std::size_t attempt = 0; attempt < 10'000'000; attempt++) {
        std::shuffle(ct.perm.begin(), ct.perm.end(), rng);
        for (std::size_t i = 0; i < k; i++) {
            wires[i] = i;
        }
        std::shuffle(wires.begin(), wires.end(), rng);
        ct.layer.clear();
        for (std::size_t i = 0; i + 1 < k; i += 2) {
            if (rng() % 8 == 0) {
                continue;
            }
            Wire a = static_cast<Wire>(wires[i]), b = static_cast<Wire>(wires[i + 1]);
            ct.layer.push_back(rng() % 2 ? CnotGate{a, b} : CnotGate{b, a});
        }
        if (!ct.layer.empty() && detail::powers_traverse(ct.matrix_rows(), k)) {
            return ct;
        }
    }
    throw std::logic_error("cyclic_traversal: search exhausted");
}

/// The powers Q^1, ..., Q^(2^k - 1) = I of cyclic_traversal(k) as a TraversalSequence.
inline TraversalSequence cyclic_traversal_sequence(std::size_t k) {
    CyclicTraversal ct = cyclic_traversal(k);
    std::vector<std::uint32_t> q = ct.matrix_rows(), x(k);
    for (std::size_t i = 0; i < k; i++) {
        x[i] = 1u << i;
    }
    TraversalSequence seq;
    seq.k = k;
    for (std::size_t t = 0; t < std::max<std::size_t>(ct.period(), 1); t++) {
        x = mul_row_bits(q, x);
        seq.mats.push_back(matrix_from_row_bits(x, k));
    }
    return seq;
}

}  // namespace parcnot
