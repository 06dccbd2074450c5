#pragma once

// Reference helpers for the tests: deliberately naive, byte-per-entry, independent of the
// bit-packed library code they check.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "parcnot/circuit.hpp"
#include "parcnot/f2matrix.hpp"

namespace testing_support {

using Dense = std::vector<std::vector<std::uint8_t>>;

inline Dense dense(const parcnot::F2Matrix &m) {
    Dense d(m.rows(), std::vector<std::uint8_t>(m.cols(), 0));
    for (std::size_t i = 0; i < m.rows(); i++) {
        for (std::size_t j = 0; j < m.cols(); j++) {
            d[i][j] = m.get(i, j) ? 1 : 0;
        }
    }
    return d;
}

inline Dense dense_identity(std::size_t n) {
    Dense d(n, std::vector<std::uint8_t>(n, 0));
    for (std::size_t i = 0; i < n; i++) {
        d[i][i] = 1;
    }
    return d;
}

inline Dense naive_mul(const Dense &a, const Dense &b) {
    std::size_t n = a.size(), p = b.size(), m = b.empty() ? 0 : b[0].size();
    Dense c(n, std::vector<std::uint8_t>(m, 0));
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j < m; j++) {
            std::uint8_t s = 0;
            for (std::size_t t = 0; t < p; t++) {
                s ^= a[i][t] & b[t][j];
            }
            c[i][j] = s;
        }
    }
    return c;
}

/// Applies gates one at a time as row additions on a dense identity.
inline Dense naive_simulate(const parcnot::Circuit &c) {
    Dense d = dense_identity(c.wires());
    for (const auto &l : c.layers()) {
        for (const auto &g : l.gates()) {
            for (std::size_t j = 0; j < c.wires(); j++) {
                d[g.target][j] ^= d[g.control][j];
            }
        }
    }
    return d;
}

/// Runs the circuit on a bit vector, gate by gate.
inline std::vector<std::uint8_t> naive_run(const parcnot::Circuit &c, std::vector<std::uint8_t> x) {
    for (const auto &l : c.layers()) {
        for (const auto &g : l.gates()) {
            x[g.target] ^= x[g.control];
        }
    }
    return x;
}

inline std::vector<std::uint8_t> naive_apply(const parcnot::F2Matrix &m, const std::vector<std::uint8_t> &x) {
    std::vector<std::uint8_t> y(m.rows(), 0);
    for (std::size_t i = 0; i < m.rows(); i++) {
        for (std::size_t j = 0; j < m.cols(); j++) {
            y[i] ^= static_cast<std::uint8_t>(m.get(i, j) & x[j]);
        }
    }
    return y;
}

/// Every layer must use each wire at most once.
inline bool layers_disjoint(const parcnot::Circuit &c) {
    for (const auto &l : c.layers()) {
        std::vector<bool> seen(c.wires(), false);
        for (const auto &g : l.gates()) {
            if (g.control == g.target || seen[g.control] || seen[g.target]) {
                return false;
            }
            seen[g.control] = seen[g.target] = true;
        }
    }
    return true;
}

inline parcnot::F2Matrix from_dense(const Dense &d) {
    parcnot::F2Matrix m(d.size(), d.empty() ? 0 : d[0].size());
    for (std::size_t i = 0; i < d.size(); i++) {
        for (std::size_t j = 0; j < d[i].size(); j++) {
            m.set(i, j, d[i][j]);
        }
    }
    return m;
}

inline parcnot::F2Matrix lower_ones(std::size_t n) {
    parcnot::F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j <= i; j++) {
            m.set(i, j, true);
        }
    }
    return m;
}

}  // namespace testing_support
