#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "parcnot/circuit.hpp"
#include "parcnot/errors.hpp"
#include "parcnot/f2matrix.hpp"
#include "parcnot/matching.hpp"
#include "parcnot/synth_free.hpp"

namespace parcnot {

/// Wire regions: data [0, n), mirror [n, 2n), work [2n, 2n + 3sn). The work region is split into
/// s pieces of 3n wires: 2n scratch followed by an n-wire accumulator.
struct AncillaLayout {
    std::size_t n = 0;
    std::size_t s = 1;
    bool clamped = false;

    static std::size_t max_scale(std::size_t n) {
        double lg = n > 1 ? std::log2(static_cast<double>(n)) : 1.0;
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(n) / (lg * lg))));
    }

    /// Values of s above max_scale(n) are clamped (with a warning on stderr).
    static AncillaLayout make(std::size_t n, std::size_t s) {
        if (n == 0 || s == 0) {
            throw LayoutError("AncillaLayout: n and s must be positive");
        }
        AncillaLayout l;
        l.n = n;
        l.s = s;
        if (s > max_scale(n)) {
            l.s = max_scale(n);
            l.clamped = true;
            std::cerr << "warning: ancilla scale " << s << " exceeds " << l.s << " for n=" << n << "; clamped\n";
        }
        return l;
    }

    std::size_t total_wires() const { return 2 * n + 3 * s * n; }
    std::size_t ancillae() const { return total_wires() - n; }
    Wire data(std::size_t i) const { return static_cast<Wire>(i); }
    Wire mirror(std::size_t i) const { return static_cast<Wire>(n + i); }
    Wire work(std::size_t i) const { return static_cast<Wire>(2 * n + i); }

    std::vector<Wire> scratch(std::size_t piece) const { return range(2 * n + piece * 3 * n, 2 * n); }
    std::vector<Wire> accumulator(std::size_t piece) const { return range(2 * n + piece * 3 * n + 2 * n, n); }
    std::vector<Wire> data_wires() const { return range(0, n); }
    std::vector<Wire> mirror_wires() const { return range(n, n); }

    void validate() const {
        if (n == 0 || s == 0 || s > max_scale(n)) {
            throw LayoutError("AncillaLayout: scale out of range");
        }
    }

private:
    static std::vector<Wire> range(std::size_t begin, std::size_t count) {
        std::vector<Wire> w(count);
        for (std::size_t i = 0; i < count; i++) {
            w[i] = static_cast<Wire>(begin + i);
        }
        return w;
    }
};

/// Bits per super-entry for an n-row problem.
inline std::size_t ancilla_group_bits(std::size_t n) {
    if (n < 4) {
        return 1;
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(n)) / 2)));
}

namespace detail {

/// Hands out scratch wires in order and reports exhaustion as BudgetExceeded.
class WirePool {
public:
    explicit WirePool(const std::vector<Wire> &wires) : wires_(wires) {}
    Wire take() {
        if (next_ == wires_.size()) {
            throw BudgetExceeded("scratch region exhausted");
        }
        return wires_[next_++];
    }
    std::size_t used() const { return next_; }

private:
    const std::vector<Wire> &wires_;
    std::size_t next_ = 0;
};

/// Layers that grow each holder list from one wire (its front) to its full size by doubling:
/// every current holder copies itself into one fresh wire per layer.
inline std::vector<Layer> doubling_layers(const std::vector<std::vector<Wire>> &holders) {
    std::vector<Layer> layers;
    std::vector<std::size_t> have(holders.size(), 1);
    while (true) {
        std::vector<CnotGate> gates;
        for (std::size_t h = 0; h < holders.size(); h++) {
            std::size_t cur = have[h];
            std::size_t grow = std::min(cur, holders[h].size() - std::min(cur, holders[h].size()));
            for (std::size_t x = 0; x < grow; x++) {
                gates.push_back({holders[h][x], holders[h][cur + x]});
            }
            have[h] = cur + grow;
        }
        if (gates.empty()) {
            break;
        }
        layers.emplace_back(std::move(gates));
    }
    return layers;
}

}  // namespace detail

/// target[i] ^= sum_b y[i, b] * source[b], for a slim y with at most t ones. Each source row is
/// fanned out by doubling into as many holders as it has ones, the holders are added into the
/// targets (one layer per bit), and the fan-out is undone.
inline Circuit gen_sparse(const F2Matrix &y, std::size_t t, const std::vector<Wire> &sources,
                          const std::vector<Wire> &targets, const std::vector<Wire> &scratch, std::size_t wires) {
    if (y.cols() != sources.size() || y.rows() != targets.size()) {
        throw DimensionMismatch("gen_sparse: shape does not match wire lists");
    }
    std::size_t ones = 0;
    for (std::size_t j = 0; j < y.cols(); j++) {
        ones += y.col_weight(j);
    }
    if (ones > t) {
        throw BudgetExceeded("gen_sparse: matrix has more ones than the budget");
    }
    Circuit out(wires);
    if (ones == 0) {
        return out;
    }
    detail::WirePool pool(scratch);
    std::vector<std::vector<Wire>> holders(y.cols());
    for (std::size_t b = 0; b < y.cols(); b++) {
        std::size_t need = std::max<std::size_t>(1, y.col_weight(b));
        holders[b].push_back(sources[b]);
        for (std::size_t x = 1; x < need; x++) {
            holders[b].push_back(pool.take());
        }
    }
    std::vector<Layer> fan = detail::doubling_layers(holders);
    for (const auto &l : fan) {
        out.push_layer(l);
    }
    // Bit b goes in layer (b + i) mod k for target i, so all layers stay matchings.
    const std::size_t k = y.cols();
    std::vector<std::size_t> used(k, 0);
    std::vector<std::vector<CnotGate>> adds(k);
    for (std::size_t i = 0; i < y.rows(); i++) {
        for (std::size_t b = 0; b < k; b++) {
            if (y.get(i, b)) {
                adds[(b + i) % k].push_back({holders[b][used[b]++], targets[i]});
            }
        }
    }
    for (auto &g : adds) {
        out.push_layer(Layer(std::move(g)));
    }
    for (auto it = fan.rbegin(); it != fan.rend(); ++it) {
        out.push_layer(*it);
    }
    return compact_layers(out);
}

/// Multiplicities and copy assignment for one gen_ycol call. Entry (g, v) covers the target rows
/// whose group-g value is v; each copy serves at most `capacity` of them.
struct CopyPlan {
    struct Entry {
        std::size_t group = 0;
        std::uint32_t value = 0;
        std::size_t multiplicity = 0;
        std::vector<Wire> copies;  // copies[0] is the P row itself
    };
    std::size_t capacity = 1;
    std::vector<Entry> entries;

    std::size_t extra_rows() const {
        std::size_t total = 0;
        for (const auto &e : entries) {
            total += e.copies.size() - 1;
        }
        return total;
    }
};

/// The three phases of a gen_ycol call. `apply` adds Y into the targets; `build` and `restore`
/// prepare and erase the additive basis, so build + apply + restore is the full fragment, and
/// running `apply` twice leaves the targets unchanged.
struct YcolFragment {
    Circuit build;
    Circuit apply;
    Circuit restore;
    std::size_t matchings = 0;
    CopyPlan plan;

    Circuit full() const { return compact_layers(concat(concat(build, apply), restore)); }
};

/// target[i] ^= sum_j y[i, j] * source[j] for y with up to 2k groups of k columns, using the
/// scratch wires (2n of them suffice) and restoring them.
inline YcolFragment gen_ycol_phases(const F2Matrix &y, std::size_t k, const std::vector<Wire> &sources,
                                    const std::vector<Wire> &targets, const std::vector<Wire> &scratch,
                                    std::size_t wires) {
    if (y.cols() != sources.size() || y.rows() != targets.size()) {
        throw LayoutError("gen_ycol: shape does not match wire lists");
    }
    const std::size_t groups = (y.cols() + k - 1) / k;
    if (groups > 2 * k) {
        throw LayoutError("gen_ycol: more than 2k column groups");
    }
    YcolFragment frag{Circuit(wires), Circuit(wires), Circuit(wires), 0, {}};
    frag.plan.capacity = std::max<std::size_t>(1, 2 * k);
    const std::size_t cap = frag.plan.capacity;

    // Values of every target row in every group.
    std::vector<std::vector<std::uint32_t>> val(groups, std::vector<std::uint32_t>(y.rows(), 0));
    for (std::size_t g = 0; g < groups; g++) {
        std::size_t width = std::min(k, y.cols() - g * k);
        for (std::size_t i = 0; i < y.rows(); i++) {
            std::uint32_t v = 0;
            for (std::size_t b = 0; b < width; b++) {
                v |= static_cast<std::uint32_t>(y.get(i, g * k + b)) << b;
            }
            val[g][i] = v;
        }
    }

    detail::WirePool pool(scratch);
    // Step 1: P_g holds every nonzero value of group g once, on its own wires.
    std::vector<std::vector<Wire>> p_wire(groups);
    Circuit step1(wires);
    {
        std::vector<Circuit> parts;
        std::vector<Wire> p_all;
        for (std::size_t g = 0; g < groups; g++) {
            std::size_t width = std::min(k, y.cols() - g * k);
            std::size_t rows = (std::size_t{1} << width) - 1;
            p_wire[g].assign(std::size_t{1} << width, 0);
            for (std::size_t v = 1; v <= rows; v++) {
                p_wire[g][v] = pool.take();
            }
        }
        // gen_sparse scratch comes after the P rows; it is released again when step 1 ends.
        std::size_t mark = pool.used();
        std::vector<Wire> rest(scratch.begin() + static_cast<std::ptrdiff_t>(mark), scratch.end());
        std::size_t offset = 0;
        for (std::size_t g = 0; g < groups; g++) {
            std::size_t width = std::min(k, y.cols() - g * k);
            std::size_t rows = (std::size_t{1} << width) - 1;
            F2Matrix pm(rows, width);
            std::vector<Wire> src(sources.begin() + static_cast<std::ptrdiff_t>(g * k),
                                  sources.begin() + static_cast<std::ptrdiff_t>(g * k + width));
            std::vector<Wire> tgt(p_wire[g].begin() + 1, p_wire[g].end());
            for (std::size_t v = 1; v <= rows; v++) {
                for (std::size_t b = 0; b < width; b++) {
                    pm.set(v - 1, b, (v >> b) & 1u);
                }
            }
            std::size_t need = width * ((std::size_t{1} << (width - 1)) - 1);
            if (offset + need > rest.size()) {
                throw BudgetExceeded("gen_ycol: scratch too small for the P blocks");
            }
            std::vector<Wire> sc(rest.begin() + static_cast<std::ptrdiff_t>(offset),
                                 rest.begin() + static_cast<std::ptrdiff_t>(offset + need));
            offset += need;
            parts.push_back(gen_sparse(pm, width << (width - 1), src, tgt, sc, wires));
        }
        for (const auto &p : parts) {
            step1 = merge_independent_schedules(step1, p);
        }
    }

    // Step 2: enough copies of every used (g, v) that each serves at most `cap` target rows.
    std::vector<std::vector<std::size_t>> users(groups * (std::size_t{1} << k));
    for (std::size_t g = 0; g < groups; g++) {
        for (std::size_t i = 0; i < y.rows(); i++) {
            if (val[g][i] != 0) {
                users[g * (std::size_t{1} << k) + val[g][i]].push_back(i);
            }
        }
    }
    std::vector<std::vector<Wire>> holders;
    for (std::size_t g = 0; g < groups; g++) {
        for (std::size_t v = 1; v < p_wire[g].size(); v++) {
            const auto &u = users[g * (std::size_t{1} << k) + v];
            if (u.empty()) {
                continue;
            }
            CopyPlan::Entry e;
            e.group = g;
            e.value = static_cast<std::uint32_t>(v);
            e.multiplicity = u.size();
            e.copies.push_back(p_wire[g][v]);
            std::size_t count = (u.size() + cap - 1) / cap;
            for (std::size_t x = 1; x < count; x++) {
                e.copies.push_back(pool.take());
            }
            holders.push_back(e.copies);
            frag.plan.entries.push_back(std::move(e));
        }
    }
    Circuit step2(wires);
    for (const auto &l : detail::doubling_layers(holders)) {
        step2.push_layer(l);
    }

    // Step 3: target rows against copies; every vertex has degree <= max(groups, cap).
    BipartiteGraph graph;
    graph.left_count = y.rows();
    graph.right_count = std::max<std::size_t>(1, holders.size() + frag.plan.extra_rows());
    std::size_t right = 0;
    for (const auto &e : frag.plan.entries) {
        const auto &u = users[e.group * (std::size_t{1} << k) + e.value];
        for (std::size_t x = 0; x < u.size(); x++) {
            graph.add_edge(u[x], right + x / cap, e.copies[x / cap]);
        }
        right += e.copies.size();
    }
    auto matchings = decompose_matchings(graph);
    frag.matchings = matchings.size();
    for (const auto &mt : matchings) {
        std::vector<CnotGate> gates;
        for (const auto &e : mt) {
            gates.push_back({static_cast<Wire>(e.tag), targets[e.left]});
        }
        frag.apply.push_layer(Layer(std::move(gates)));
    }

    frag.build = compact_layers(concat(step1, step2));
    frag.restore = invert_circuit(frag.build);
    return frag;
}

inline Circuit gen_ycol(const F2Matrix &y, std::size_t k, const std::vector<Wire> &sources,
                        const std::vector<Wire> &targets, const std::vector<Wire> &scratch, std::size_t wires) {
    return gen_ycol_phases(y, k, sources, targets, scratch, wires).full();
}

/// target[i] ^= sum_j y[i, j] * source[j] for up to s * 2k^2 columns. Piece 0 writes straight into
/// the targets; piece p > 0 writes into its accumulator, the accumulators are summed into the
/// targets by a fan-in tree (then the tree is undone), and each accumulator is erased by running
/// its add phase a second time before the bases are restored.
inline Circuit gen_scols(const F2Matrix &y, const AncillaLayout &layout, const std::vector<Wire> &sources,
                         const std::vector<Wire> &targets) {
    const std::size_t n = layout.n;
    const std::size_t k = ancilla_group_bits(n);
    const std::size_t width = 2 * k * k;
    if (y.rows() != n || y.cols() != sources.size() || targets.size() != n) {
        throw LayoutError("gen_scols: shape does not match layout");
    }
    const std::size_t pieces = (y.cols() + width - 1) / width;
    if (pieces > layout.s) {
        throw LayoutError("gen_scols: more columns than s pieces can hold");
    }
    const std::size_t wires = layout.total_wires();
    std::vector<YcolFragment> frags;
    for (std::size_t p = 0; p < pieces; p++) {
        std::size_t c0 = p * width, c1 = std::min(y.cols(), c0 + width);
        F2Matrix part = y.block(0, c0, n, c1 - c0);
        std::vector<Wire> src(sources.begin() + static_cast<std::ptrdiff_t>(c0),
                              sources.begin() + static_cast<std::ptrdiff_t>(c1));
        frags.push_back(gen_ycol_phases(part, k, src, p == 0 ? targets : layout.accumulator(p),
                                        layout.scratch(p), wires));
    }
    Circuit forward(wires), backward(wires);
    for (std::size_t p = 0; p < pieces; p++) {
        forward = merge_independent_schedules(forward, concat(frags[p].build, frags[p].apply));
        Circuit tail = frags[p].restore;
        if (p > 0) {
            tail = concat(frags[p].apply, tail);
        }
        backward = merge_independent_schedules(backward, tail);
    }
    Circuit fan(wires);
    if (pieces > 1) {
        // Pairwise tree over accumulators 1..pieces-1, then one layer into the targets.
        std::vector<std::size_t> live;
        for (std::size_t p = 1; p < pieces; p++) {
            live.push_back(p);
        }
        Circuit tree(wires);
        while (live.size() > 1) {
            std::vector<CnotGate> gates;
            std::vector<std::size_t> next;
            for (std::size_t x = 0; x + 1 < live.size(); x += 2) {
                auto dst = layout.accumulator(live[x]);
                auto src = layout.accumulator(live[x + 1]);
                for (std::size_t i = 0; i < n; i++) {
                    gates.push_back({src[i], dst[i]});
                }
                next.push_back(live[x]);
            }
            if (live.size() % 2) {
                next.push_back(live.back());
            }
            tree.push_layer(Layer(std::move(gates)));
            live = std::move(next);
        }
        fan.append(tree);
        std::vector<CnotGate> gates;
        auto acc = layout.accumulator(live[0]);
        for (std::size_t i = 0; i < n; i++) {
            gates.push_back({acc[i], targets[i]});
        }
        fan.push_layer(Layer(std::move(gates)));
        fan.append(invert_circuit(tree));
    }
    return compact_layers(concat(concat(forward, fan), backward));
}

/// target ^= m * source with the work region restored. Columns of m are consumed s * 2k^2 at a
/// time, one gen_scols call each.
inline Circuit embed_m(const F2Matrix &m, const AncillaLayout &layout, const std::vector<Wire> &sources,
                       const std::vector<Wire> &targets) {
    layout.validate();
    if (!m.square() || m.rows() != layout.n || sources.size() != layout.n || targets.size() != layout.n) {
        throw LayoutError("embed_m: matrix or wire lists do not match the layout");
    }
    const std::size_t k = ancilla_group_bits(layout.n);
    const std::size_t chunk = layout.s * 2 * k * k;
    Circuit out(layout.total_wires());
    for (std::size_t c0 = 0; c0 < layout.n; c0 += chunk) {
        std::size_t c1 = std::min(layout.n, c0 + chunk);
        std::vector<Wire> src(sources.begin() + static_cast<std::ptrdiff_t>(c0),
                              sources.begin() + static_cast<std::ptrdiff_t>(c1));
        out.append(gen_scols(m.block(0, c0, layout.n, c1 - c0), layout, src, targets));
    }
    return compact_layers(out);
}

/// The default roles: mirror ^= m * data.
inline Circuit embed_m(const F2Matrix &m, const AncillaLayout &layout) {
    return embed_m(m, layout, layout.data_wires(), layout.mirror_wires());
}

/// Circuit on n data wires and (3s + 1)n ancillae implementing m: mirror ^= M data, then
/// data ^= M^-1 mirror (which zeroes the data wires), then a 3-layer swap of the two blocks.
inline Circuit synth_with_ancillae(const F2Matrix &m, std::size_t s) {
    if (!m.square()) {
        throw DimensionMismatch("synth_with_ancillae: matrix is not square");
    }
    F2Matrix inv = invert(m);
    AncillaLayout layout = AncillaLayout::make(m.rows(), s);
    Circuit c1 = embed_m(m, layout, layout.data_wires(), layout.mirror_wires());
    Circuit c2 = embed_m(inv, layout, layout.mirror_wires(), layout.data_wires());
    Circuit swap(layout.total_wires());
    std::vector<CnotGate> ab, ba;
    for (std::size_t i = 0; i < layout.n; i++) {
        ab.push_back({layout.data(i), layout.mirror(i)});
        ba.push_back({layout.mirror(i), layout.data(i)});
    }
    swap.push_layer(Layer(ab));
    swap.push_layer(Layer(ba));
    swap.push_layer(Layer(ab));
    Circuit all = compact_layers(concat(concat(c1, c2), swap));
    Circuit out(layout.total_wires(), layout.n);
    for (const auto &l : all.layers()) {
        out.push_layer(l);
    }
    return out;
}

}  // namespace parcnot
