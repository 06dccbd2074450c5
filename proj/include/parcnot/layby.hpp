#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "parcnot/errors.hpp"
#include "parcnot/f2matrix.hpp"

namespace parcnot {

/// r x c matrix whose entries are k-bit vectors (bit j of an entry is column j of its group).
struct SuperMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t k = 1;
    std::vector<std::uint16_t> values;

    SuperMatrix() = default;
    SuperMatrix(std::size_t r, std::size_t c, std::size_t bits) : rows(r), cols(c), k(bits), values(r * c, 0) {
        if (bits < 1 || bits > 16) {
            throw DimensionMismatch("SuperMatrix: k must be in [1, 16]");
        }
    }

    std::uint16_t at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
    std::uint16_t &at(std::size_t i, std::size_t j) { return values[i * cols + j]; }

    bool operator==(const SuperMatrix &) const = default;
};

inline SuperMatrix super_from_matrix(const F2Matrix &m, std::size_t k) {
    if (m.cols() % k != 0) {
        throw DimensionMismatch("super_from_matrix: column count is not a multiple of k");
    }
    SuperMatrix s(m.rows(), m.cols() / k, k);
    for (std::size_t i = 0; i < m.rows(); i++) {
        for (std::size_t j = 0; j < s.cols; j++) {
            std::uint16_t v = 0;
            for (std::size_t b = 0; b < k; b++) {
                v |= static_cast<std::uint16_t>(m.get(i, j * k + b)) << b;
            }
            s.at(i, j) = v;
        }
    }
    return s;
}

inline F2Matrix matrix_from_super(const SuperMatrix &s) {
    F2Matrix m(s.rows, s.cols * s.k);
    for (std::size_t i = 0; i < s.rows; i++) {
        for (std::size_t j = 0; j < s.cols; j++) {
            for (std::size_t b = 0; b < s.k; b++) {
                if ((s.at(i, j) >> b) & 1u) {
                    m.set(i, j * s.k + b, true);
                }
            }
        }
    }
    return m;
}

inline SuperMatrix super_xor(const SuperMatrix &a, const SuperMatrix &b) {
    if (a.rows != b.rows || a.cols != b.cols || a.k != b.k) {
        throw DimensionMismatch("super_xor: shape mismatch");
    }
    SuperMatrix out = a;
    for (std::size_t i = 0; i < out.values.size(); i++) {
        out.values[i] ^= b.values[i];
    }
    return out;
}

/// Largest number of times any single value occurs in one row or one column.
inline std::size_t max_occurrence(const SuperMatrix &s) {
    std::size_t nv = std::size_t{1} << s.k;
    std::vector<std::size_t> cnt(nv);
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.rows; i++) {
        std::fill(cnt.begin(), cnt.end(), 0);
        for (std::size_t j = 0; j < s.cols; j++) {
            best = std::max(best, ++cnt[s.at(i, j)]);
        }
    }
    for (std::size_t j = 0; j < s.cols; j++) {
        std::fill(cnt.begin(), cnt.end(), 0);
        for (std::size_t i = 0; i < s.rows; i++) {
            best = std::max(best, ++cnt[s.at(i, j)]);
        }
    }
    return best;
}

struct LaybyPair {
    SuperMatrix b;
    SuperMatrix c_mat;  // b XOR the input strip
};

inline std::size_t layby_bound(std::size_t n_ctx) {
    double lg = std::log2(static_cast<double>(n_ctx));
    return static_cast<std::size_t>(std::floor(std::sqrt(std::exp(1.0) * static_cast<double>(n_ctx)) / lg));
}

struct LaybyOptions {
    std::size_t n_ctx = 0;
    std::size_t bound = 0;           // 0: layby_bound(n_ctx)
    std::size_t repair_passes = 200;  // 0 disables the repair stage
    std::uint64_t seed = 0;
    bool throw_on_failure = true;
};

namespace detail {

/// Fixed-point probability in [0, 1] with 128 fractional bits; 1.0 saturates to all ones.
using Prob = unsigned __int128;
constexpr Prob kProbOne = ~Prob{0};

/// Sum of up to a few Probs without overflow: value = carry * 2^128 + low.
struct ProbSum {
    std::uint64_t carry = 0;
    Prob low = 0;

    void add(Prob p) {
        Prob next = low + p;
        if (next < low) {
            carry++;
        }
        low = next;
    }
    bool operator<(const ProbSum &o) const { return carry != o.carry ? carry < o.carry : low < o.low; }
};

/// tail(u, v) = P[Bin(u, 1/2) > v] for -1 <= v <= u, via tail(u,v) = (tail(u-1,v) + tail(u-1,v-1)) / 2,
/// each halving rounded toward zero.
class TailTable {
public:
    explicit TailTable(std::size_t max_u) : width_(max_u + 2), table_((max_u + 1) * (max_u + 2)) {
        for (std::size_t u = 0; u <= max_u; u++) {
            for (std::size_t vi = 0; vi <= u + 1; vi++) {
                long v = static_cast<long>(vi) - 1;
                Prob value;
                if (v < 0) {
                    value = kProbOne;
                } else if (static_cast<std::size_t>(v) >= u) {
                    value = 0;
                } else {
                    Prob a = table_[(u - 1) * width_ + vi];
                    Prob b = table_[(u - 1) * width_ + vi - 1];
                    value = (a >> 1) + (b >> 1) + (a & b & 1);
                }
                table_[u * width_ + vi] = value;
            }
        }
        max_u_ = max_u;
    }

    std::size_t max_u() const { return max_u_; }

    Prob tail(std::size_t u, long v) const {
        if (v < 0) {
            return kProbOne;
        }
        if (static_cast<std::size_t>(v) >= u) {
            return 0;
        }
        return table_[u * width_ + static_cast<std::size_t>(v) + 1];
    }

private:
    std::size_t width_;
    std::size_t max_u_ = 0;
    std::vector<Prob> table_;
};

inline const TailTable &tail_table(std::size_t max_u) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<TailTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    for (const auto &t : cache) {
        if (t->max_u() >= max_u) {
            return *t;
        }
    }
    cache.push_back(std::make_unique<TailTable>(std::max<std::size_t>(max_u, 64)));
    return *cache.back();
}

// One family of counted lines: rows or columns of B or of C.
struct LineCounts {
    std::size_t lines = 0;
    std::size_t slots = 0;  // 2^k
    std::vector<std::uint32_t> cnt;

    LineCounts(std::size_t l, std::size_t s) : lines(l), slots(s), cnt(l * s, 0) {}
    std::uint32_t &at(std::size_t line, std::size_t v) { return cnt[line * slots + v]; }
};

/// Decides the bits of B level by level. At level z each line/prefix group of size N_p splits in two;
/// the pessimistic estimator is the summed probability that either half exceeds its threshold
/// floor((1/2 + eps)^(z+1) * N) when the undecided bits are fair coins.
inline SuperMatrix greedy_layby(const SuperMatrix &a, std::size_t n_ctx) {
    const std::size_t r = a.rows, c = a.cols, k = a.k;
    const std::size_t nv = std::size_t{1} << k;
    double eps = 1.0 / (2.0 * std::log2(static_cast<double>(std::max<std::size_t>(n_ctx, 4))));
    const TailTable &tt = tail_table(std::max(r, c));
    SuperMatrix b(r, c, k);

    for (std::size_t z = 0; z < k; z++) {
        double scale = std::pow(0.5 + eps, static_cast<double>(z + 1));
        long t_row = static_cast<long>(std::floor(scale * static_cast<double>(c)));
        long t_col = static_cast<long>(std::floor(scale * static_cast<double>(r)));
        std::uint32_t pmask = static_cast<std::uint32_t>((1u << z) - 1);
        // Undecided counts per (line, prefix) and decided counts per (line, prefix | bit << z).
        LineCounts rem_br(r, nv), rem_bc(c, nv), rem_cr(r, nv), rem_cc(c, nv);
        LineCounts got_br(r, nv), got_bc(c, nv), got_cr(r, nv), got_cc(c, nv);
        for (std::size_t i = 0; i < r; i++) {
            for (std::size_t j = 0; j < c; j++) {
                std::uint32_t pb = b.at(i, j) & pmask;
                std::uint32_t pc = (b.at(i, j) ^ a.at(i, j)) & pmask;
                rem_br.at(i, pb)++;
                rem_bc.at(j, pb)++;
                rem_cr.at(i, pc)++;
                rem_cc.at(j, pc)++;
            }
        }
        // New-state tails of one group if the next member lands on side `side`.
        auto group_cost = [&](LineCounts &rem, LineCounts &got, std::size_t line, std::uint32_t prefix,
                              std::uint32_t side, long thresh, ProbSum &acc) {
            std::size_t u = rem.at(line, prefix) - 1;
            long k_same = got.at(line, prefix | (side << z));
            long k_other = got.at(line, prefix | ((side ^ 1u) << z));
            acc.add(tt.tail(u, thresh - k_same - 1));
            acc.add(tt.tail(u, thresh - k_other));
        };
        for (std::size_t i = 0; i < r; i++) {
            for (std::size_t j = 0; j < c; j++) {
                std::uint32_t av = a.at(i, j);
                std::uint32_t pb = b.at(i, j) & pmask;
                std::uint32_t pc = (b.at(i, j) ^ av) & pmask;
                std::uint32_t abit = (av >> z) & 1u;
                ProbSum cost[2];
                for (std::uint32_t bit = 0; bit < 2; bit++) {
                    group_cost(rem_br, got_br, i, pb, bit, t_row, cost[bit]);
                    group_cost(rem_bc, got_bc, j, pb, bit, t_col, cost[bit]);
                    group_cost(rem_cr, got_cr, i, pc, bit ^ abit, t_row, cost[bit]);
                    group_cost(rem_cc, got_cc, j, pc, bit ^ abit, t_col, cost[bit]);
                }
                std::uint32_t bit = (cost[1] < cost[0]) ? 1u : 0u;
                std::uint32_t cbit = bit ^ abit;
                rem_br.at(i, pb)--;
                rem_bc.at(j, pb)--;
                rem_cr.at(i, pc)--;
                rem_cc.at(j, pc)--;
                got_br.at(i, pb | (bit << z))++;
                got_bc.at(j, pb | (bit << z))++;
                got_cr.at(i, pc | (cbit << z))++;
                got_cc.at(j, pc | (cbit << z))++;
                b.at(i, j) = static_cast<std::uint16_t>(b.at(i, j) | (bit << z));
            }
        }
    }
    return b;
}

/// Min-conflicts sweeps: every entry sitting in an over-full row or column (of B or C) moves to
/// the value with the least total overflow. Returns true once all counts are within `bound`.
inline bool repair_layby(const SuperMatrix &a, SuperMatrix &b, std::size_t bound, std::size_t passes,
                         std::uint64_t seed) {
    const std::size_t r = a.rows, c = a.cols, nv = std::size_t{1} << a.k;
    LineCounts br(r, nv), bc(c, nv), cr(r, nv), cc(c, nv);
    for (std::size_t i = 0; i < r; i++) {
        for (std::size_t j = 0; j < c; j++) {
            std::uint32_t v = b.at(i, j), w = v ^ a.at(i, j);
            br.at(i, v)++;
            bc.at(j, v)++;
            cr.at(i, w)++;
            cc.at(j, w)++;
        }
    }
    auto over = [&](std::uint32_t x) -> std::size_t { return x > bound ? x - bound : 0; };
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(r * c);
    for (std::size_t x = 0; x < order.size(); x++) {
        order[x] = x;
    }
    std::vector<std::uint32_t> ties;
    for (std::size_t pass = 0; pass <= passes; pass++) {
        std::size_t bad = 0;
        for (std::size_t i = 0; i < r; i++) {
            for (std::size_t v = 0; v < nv; v++) {
                bad += over(br.at(i, v)) + over(cr.at(i, v));
            }
        }
        for (std::size_t j = 0; j < c; j++) {
            for (std::size_t v = 0; v < nv; v++) {
                bad += over(bc.at(j, v)) + over(cc.at(j, v));
            }
        }
        if (bad == 0) {
            return true;
        }
        if (pass == passes) {
            break;
        }
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t x : order) {
            std::size_t i = x / c, j = x % c;
            std::uint32_t av = a.at(i, j);
            std::uint32_t v = b.at(i, j), w = v ^ av;
            if (br.at(i, v) <= bound && bc.at(j, v) <= bound && cr.at(i, w) <= bound && cc.at(j, w) <= bound) {
                continue;
            }
            br.at(i, v)--;
            bc.at(j, v)--;
            cr.at(i, w)--;
            cc.at(j, w)--;
            std::size_t best = static_cast<std::size_t>(-1);
            ties.clear();
            for (std::uint32_t nvv = 0; nvv < nv; nvv++) {
                std::uint32_t nw = nvv ^ av;
                std::size_t cost = over(br.at(i, nvv) + 1) + over(bc.at(j, nvv) + 1) + over(cr.at(i, nw) + 1) +
                                   over(cc.at(j, nw) + 1);
                if (cost < best) {
                    best = cost;
                    ties.clear();
                }
                if (cost == best) {
                    ties.push_back(nvv);
                }
            }
            std::uint32_t pick = ties[rng() % ties.size()];
            std::uint32_t pw = pick ^ av;
            br.at(i, pick)++;
            bc.at(j, pick)++;
            cr.at(i, pw)++;
            cc.at(j, pw)++;
            b.at(i, j) = static_cast<std::uint16_t>(pick);
        }
    }
    return false;
}

}  // namespace detail

/// Finds B such that every value occurs at most `bound` times in each row and column of both B
/// and A XOR B. A derandomized greedy chooses B bit by bit, then any leftover overflow is repaired.
inline LaybyPair find_layby(const SuperMatrix &a, const LaybyOptions &opt) {
    if (a.rows == 0 || a.cols == 0) {
        throw DimensionMismatch("find_layby: empty strip");
    }
    std::size_t bound = opt.bound ? opt.bound : layby_bound(opt.n_ctx);
    LaybyPair out;
    out.b = detail::greedy_layby(a, opt.n_ctx);
    out.c_mat = super_xor(a, out.b);
    bool ok = std::max(max_occurrence(out.b), max_occurrence(out.c_mat)) <= bound;
    if (!ok && opt.repair_passes > 0) {
        ok = detail::repair_layby(a, out.b, bound, opt.repair_passes, opt.seed);
        out.c_mat = super_xor(a, out.b);
    }
    if (!ok && opt.throw_on_failure) {
        throw LaybyFailure("find_layby: occurrence bound " + std::to_string(bound) + " not reached");
    }
    return out;
}

inline LaybyPair find_layby(const SuperMatrix &a, std::size_t n_ctx) {
    LaybyOptions opt;
    opt.n_ctx = n_ctx;
    return find_layby(a, opt);
}

}  // namespace parcnot
