#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "parcnot/circuit.hpp"
#include "parcnot/errors.hpp"
#include "parcnot/f2matrix.hpp"

namespace parcnot {

using BigCount = boost::multiprecision::cpp_int;

/// |GL(n, 2)| = prod_{i<n} (2^n - 2^i).
inline BigCount gl_count(std::size_t n) {
    BigCount total = 1;
    BigCount full = BigCount(1) << n;
    for (std::size_t i = 0; i < n; i++) {
        total *= full - (BigCount(1) << i);
    }
    return total;
}

/// Number of distinct layers on N wires: choose 2t wires, pair them and orient each pair.
inline BigCount layer_count(std::size_t wires) {
    BigCount total = 0;
    BigCount choose = 1;  // C(N, 2t), updated incrementally
    BigCount pairs = 1;   // (2t)! / t!
    for (std::size_t t = 0; 2 * t <= wires; t++) {
        if (t > 0) {
            choose = choose * (wires - 2 * t + 2) * (wires - 2 * t + 1) / ((2 * t - 1) * (2 * t));
            pairs = pairs * (2 * t - 1) * (2 * t) / t;
        }
        total += choose * pairs;
    }
    return total;
}

/// Smallest d with layer_count(n + m)^d >= |GL(n, 2)|: fewer layers cannot reach every matrix.
inline std::size_t counting_depth_bound(std::size_t n, std::size_t m) {
    BigCount target = gl_count(n);
    BigCount per = layer_count(n + m);
    BigCount reach = 1;
    std::size_t d = 0;
    while (reach < target) {
        reach *= per;
        d++;
    }
    return d;
}

namespace detail {

inline std::size_t ceil_log2(std::size_t w) { return w <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(w - 1)); }

}  // namespace detail

/// Light-cone bound: an output of weight w needs depth ceil(log2 w), and so does an input that
/// reaches w outputs.
inline std::size_t fanin_depth_bound(const F2Matrix &m) {
    if (!m.square()) {
        throw DimensionMismatch("fanin_depth_bound: matrix is not square");
    }
    std::size_t best = 0;
    for (std::size_t i = 0; i < m.rows(); i++) {
        best = std::max(best, detail::ceil_log2(m.row_weight(i)));
        best = std::max(best, detail::ceil_log2(m.col_weight(i)));
    }
    return best;
}

/// Every layer on n wires, the empty one first.
inline std::vector<Layer> all_layers(std::size_t n) {
    std::vector<Layer> out;
    std::vector<CnotGate> cur;
    std::vector<bool> busy(n, false);
    // Wires are decided in increasing order: each is idle, or paired with a later idle wire.
    auto rec = [&](auto &&self, std::size_t w) -> void {
        while (w < n && busy[w]) {
            w++;
        }
        if (w >= n) {
            out.emplace_back(cur);
            return;
        }
        busy[w] = true;
        self(self, w + 1);
        for (std::size_t v = w + 1; v < n; v++) {
            if (busy[v]) {
                continue;
            }
            busy[v] = true;
            for (bool flip : {false, true}) {
                cur.push_back(flip ? CnotGate{static_cast<Wire>(v), static_cast<Wire>(w)}
                                   : CnotGate{static_cast<Wire>(w), static_cast<Wire>(v)});
                self(self, w + 1);
                cur.pop_back();
            }
            busy[v] = false;
        }
        busy[w] = false;
    };
    rec(rec, 0);
    return out;
}

namespace detail {

/// Row-major n x n matrix (n <= 4) in the low n^2 bits: bit i*n + j is entry (i, j).
inline std::uint16_t pack_small(const F2Matrix &m) {
    std::uint16_t x = 0;
    for (std::size_t i = 0; i < m.rows(); i++) {
        for (std::size_t j = 0; j < m.cols(); j++) {
            if (m.get(i, j)) {
                x = static_cast<std::uint16_t>(x | (1u << (i * m.cols() + j)));
            }
        }
    }
    return x;
}

inline std::uint16_t apply_layer_small(std::uint16_t x, const Layer &l, std::size_t n) {
    std::uint16_t mask = static_cast<std::uint16_t>((1u << n) - 1);
    std::uint16_t out = x;
    for (const auto &g : l.gates()) {
        std::uint16_t row = static_cast<std::uint16_t>((x >> (g.control * n)) & mask);
        out = static_cast<std::uint16_t>(out ^ (row << (g.target * n)));
    }
    return out;
}

inline constexpr std::uint8_t kUnreached = 0xff;

/// BFS distances from I over all 2^(n^2) packed states; unreachable (singular) states stay 0xff.
inline const std::vector<std::uint8_t> &depth_table(std::size_t n) {
    static std::array<std::vector<std::uint8_t>, 5> tables;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto &t = tables[n];
    if (!t.empty()) {
        return t;
    }
    t.assign(std::size_t{1} << (n * n), kUnreached);
    auto layers = all_layers(n);
    std::uint16_t id = pack_small(F2Matrix::identity(n));
    std::deque<std::uint16_t> queue{id};
    t[id] = 0;
    while (!queue.empty()) {
        std::uint16_t x = queue.front();
        queue.pop_front();
        for (const auto &l : layers) {
            std::uint16_t y = apply_layer_small(x, l, n);
            if (t[y] == kUnreached) {
                t[y] = static_cast<std::uint8_t>(t[x] + 1);
                queue.push_back(y);
            }
        }
    }
    return t;
}

}  // namespace detail

/// Exact minimum ancilla-free depth by breadth-first search over GL(n, 2), n <= 4.
inline std::size_t bfs_optimal_depth(const F2Matrix &m) {
    if (!m.square()) {
        throw DimensionMismatch("bfs_optimal_depth: matrix is not square");
    }
    if (m.rows() > 4) {
        throw TooLarge("bfs_optimal_depth: n > 4 is not tractable");
    }
    std::uint8_t d = detail::depth_table(m.rows())[detail::pack_small(m)];
    if (d == detail::kUnreached) {
        throw SingularMatrix("bfs_optimal_depth: matrix is singular");
    }
    return d;
}

}  // namespace parcnot
