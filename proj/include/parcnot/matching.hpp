#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "parcnot/errors.hpp"

namespace parcnot {

/// Bipartite multigraph. Each edge carries an opaque tag so callers can map colour classes back
/// to whatever the edge encodes (a CNOT source/target pair, usually).
struct BipartiteGraph {
    struct Edge {
        std::size_t left;
        std::size_t right;
        std::uint64_t tag = 0;

        bool operator==(const Edge &) const = default;
    };

    std::size_t left_count = 0;
    std::size_t right_count = 0;
    std::vector<Edge> edges;

    void add_edge(std::size_t left, std::size_t right, std::uint64_t tag = 0) {
        if (left >= left_count || right >= right_count) {
            throw DimensionMismatch("BipartiteGraph: vertex index out of range");
        }
        edges.push_back({left, right, tag});
    }
};

using Matching = std::vector<BipartiteGraph::Edge>;

inline std::size_t max_degree(const BipartiteGraph &g) {
    std::vector<std::size_t> dl(g.left_count, 0), dr(g.right_count, 0);
    std::size_t best = 0;
    for (const auto &e : g.edges) {
        best = std::max({best, ++dl[e.left], ++dr[e.right]});
    }
    return best;
}

namespace detail {

// Edges are referenced by index into the caller's edge list throughout.
struct EdgeRef {
    std::size_t left;
    std::size_t right;
    std::size_t id;
};

inline std::size_t max_degree_of(const std::vector<EdgeRef> &edges, std::size_t nl, std::size_t nr) {
    std::vector<std::size_t> dl(nl, 0), dr(nr, 0);
    std::size_t best = 0;
    for (const auto &e : edges) {
        best = std::max({best, ++dl[e.left], ++dr[e.right]});
    }
    return best;
}

/// Kempe-chain colouring with exactly `colors` colours (colors >= max degree). For each edge pick
/// a colour a free at the left end and b free at the right end; if they differ, swap a/b along the
/// alternating path leaving the right end, which cannot return to the left end in a bipartite graph.
inline std::vector<std::vector<std::size_t>> kempe_color(
    const std::vector<EdgeRef> &edges, std::size_t nl, std::size_t nr, std::size_t colors) {
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    // at[v * colors + c] = local edge index using colour c at vertex v; right vertices follow left ones.
    std::vector<std::size_t> at((nl + nr) * colors, kNone);
    std::vector<std::size_t> color(edges.size(), kNone);
    auto lv = [&](std::size_t e) { return edges[e].left; };
    auto rv = [&](std::size_t e) { return nl + edges[e].right; };
    auto free_color = [&](std::size_t v) {
        for (std::size_t c = 0; c < colors; c++) {
            if (at[v * colors + c] == kNone) {
                return c;
            }
        }
        return kNone;
    };
    std::vector<std::size_t> path;
    for (std::size_t e = 0; e < edges.size(); e++) {
        std::size_t u = lv(e), v = rv(e);
        std::size_t a = free_color(u);
        std::size_t b = free_color(v);
        if (at[v * colors + a] != kNone) {
            // Walk the a/b alternating path from v and swap its colours so that a becomes free at v.
            path.clear();
            std::size_t cur = v;
            std::size_t want = a;
            while (true) {
                std::size_t f = at[cur * colors + want];
                if (f == kNone) {
                    break;
                }
                path.push_back(f);
                cur = (lv(f) == cur) ? rv(f) : lv(f);
                want = (want == a) ? b : a;
            }
            for (std::size_t f : path) {
                at[lv(f) * colors + color[f]] = kNone;
                at[rv(f) * colors + color[f]] = kNone;
            }
            for (std::size_t f : path) {
                color[f] = (color[f] == a) ? b : a;
                at[lv(f) * colors + color[f]] = f;
                at[rv(f) * colors + color[f]] = f;
            }
        }
        color[e] = a;
        at[u * colors + a] = e;
        at[v * colors + a] = e;
    }
    std::vector<std::vector<std::size_t>> classes(colors);
    for (std::size_t e = 0; e < edges.size(); e++) {
        classes[color[e]].push_back(edges[e].id);
    }
    return classes;
}

/// Splits the edges into two halves so every vertex of degree d keeps at most ceil(d/2) edges in
/// each half: odd-degree vertices are joined to a dummy vertex on the other side, then each Euler
/// circuit is coloured alternately.
inline std::pair<std::vector<EdgeRef>, std::vector<EdgeRef>> euler_split(
    const std::vector<EdgeRef> &edges, std::size_t nl, std::size_t nr) {
    // Vertices 0..nl-1 left, nl..nl+nr-1 right, nl+nr dummy-left, nl+nr+1 dummy-right.
    std::size_t nv = nl + nr + 2;
    std::size_t dummy_l = nl + nr, dummy_r = nl + nr + 1;
    struct HalfEdge {
        std::size_t a, b;
        bool real;
        std::size_t idx;
    };
    std::vector<HalfEdge> all;
    all.reserve(edges.size() + nl + nr + 1);
    std::vector<std::size_t> deg(nv, 0);
    for (std::size_t i = 0; i < edges.size(); i++) {
        all.push_back({edges[i].left, nl + edges[i].right, true, i});
        deg[edges[i].left]++;
        deg[nl + edges[i].right]++;
    }
    for (std::size_t v = 0; v < nl; v++) {
        if (deg[v] % 2) {
            all.push_back({v, dummy_r, false, 0});
            deg[dummy_r]++;
        }
    }
    for (std::size_t v = nl; v < nl + nr; v++) {
        if (deg[v] % 2) {
            all.push_back({dummy_l, v, false, 0});
            deg[dummy_l]++;
        }
    }
    if (deg[dummy_r] % 2) {
        all.push_back({dummy_l, dummy_r, false, 0});
    }
    // CSR adjacency: the incident edges of v are inc[off[v] .. off[v + 1]).
    std::vector<std::size_t> off(nv + 1, 0);
    for (const auto &h : all) {
        off[h.a + 1]++;
        off[h.b + 1]++;
    }
    for (std::size_t v = 0; v < nv; v++) {
        off[v + 1] += off[v];
    }
    std::vector<std::size_t> inc(off[nv]);
    {
        std::vector<std::size_t> fill(off.begin(), off.end() - 1);
        for (std::size_t i = 0; i < all.size(); i++) {
            inc[fill[all[i].a]++] = i;
            inc[fill[all[i].b]++] = i;
        }
    }
    std::vector<std::size_t> next(off.begin(), off.end() - 1);
    std::vector<char> used(all.size(), 0);
    std::vector<int> side(all.size(), -1);
    // Hierholzer: every vertex has even degree, so each walk closes; alternate colours along the
    // emitted circuit. Bipartite circuits have even length, so the alternation is consistent.
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::pair<std::size_t, std::size_t>> stack;  // (vertex, edge used to get here)
    std::vector<std::size_t> circuit;
    for (std::size_t start = 0; start < nv; start++) {
        if (next[start] == off[start + 1]) {
            continue;
        }
        stack.clear();
        circuit.clear();
        stack.push_back({start, kNone});
        while (!stack.empty()) {
            std::size_t v = stack.back().first;
            while (next[v] < off[v + 1] && used[inc[next[v]]]) {
                next[v]++;
            }
            if (next[v] == off[v + 1]) {
                if (stack.back().second != kNone) {
                    circuit.push_back(stack.back().second);
                }
                stack.pop_back();
                continue;
            }
            std::size_t e = inc[next[v]];
            used[e] = 1;
            std::size_t w = all[e].a == v ? all[e].b : all[e].a;
            stack.push_back({w, e});
        }
        for (std::size_t i = 0; i < circuit.size(); i++) {
            side[circuit[i]] = static_cast<int>(i % 2);
        }
    }
    std::pair<std::vector<EdgeRef>, std::vector<EdgeRef>> out;
    for (std::size_t i = 0; i < all.size(); i++) {
        if (!all[i].real) {
            continue;
        }
        (side[i] == 0 ? out.first : out.second).push_back(edges[all[i].idx]);
    }
    return out;
}

inline void decompose_into(const std::vector<EdgeRef> &edges, std::size_t nl, std::size_t nr,
                           std::vector<std::vector<std::size_t>> &out) {
    if (edges.empty()) {
        return;
    }
    std::size_t delta = max_degree_of(edges, nl, nr);
    if (delta == 1) {
        std::vector<std::size_t> ids;
        ids.reserve(edges.size());
        for (const auto &e : edges) {
            ids.push_back(e.id);
        }
        out.push_back(std::move(ids));
        return;
    }
    if (delta % 2 == 0) {
        auto [a, b] = euler_split(edges, nl, nr);
        decompose_into(a, nl, nr, out);
        decompose_into(b, nl, nr, out);
        return;
    }
    for (auto &cls : kempe_color(edges, nl, nr, delta)) {
        if (!cls.empty()) {
            out.push_back(std::move(cls));
        }
    }
}

}  // namespace detail

/// Proper edge colouring with max_degree(g) colours (Konig). Each returned matching is one colour
/// class; every edge lands in exactly one of them.
inline std::vector<Matching> decompose_matchings(const BipartiteGraph &g) {
    std::vector<detail::EdgeRef> refs;
    refs.reserve(g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); i++) {
        const auto &e = g.edges[i];
        if (e.left >= g.left_count || e.right >= g.right_count) {
            throw DimensionMismatch("decompose_matchings: vertex index out of range");
        }
        refs.push_back({e.left, e.right, i});
    }
    std::vector<std::vector<std::size_t>> classes;
    detail::decompose_into(refs, g.left_count, g.right_count, classes);
    std::vector<Matching> out;
    out.reserve(classes.size());
    for (const auto &cls : classes) {
        Matching m;
        m.reserve(cls.size());
        for (std::size_t id : cls) {
            m.push_back(g.edges[id]);
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace parcnot
