#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "parcnot/circuit.hpp"
#include "parcnot/errors.hpp"

namespace parcnot {

/// Which child of an internal node carries the node's qubit: L keeps i(left) and adds i(right)
/// into it, R keeps i(right) and adds i(left).
enum class Side : std::uint8_t { L, R };

struct TreeNode {
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    bool leaf = true;
    Wire label = 0;
    Side side = Side::L;
    std::size_t left = kNone;
    std::size_t right = kNone;
};

/// Proper binary tree stored in an arena. Leaves carry distinct labels 0..n-1 (wire indices).
class CnotTree {
public:
    CnotTree() = default;
    CnotTree(std::vector<TreeNode> nodes, std::size_t root) : nodes_(std::move(nodes)), root_(root) { validate(); }

    static CnotTree single(Wire label) { return CnotTree({TreeNode{true, label, Side::L}}, 0); }

    const std::vector<TreeNode> &nodes() const { return nodes_; }
    const TreeNode &node(std::size_t i) const { return nodes_[i]; }
    std::size_t root() const { return root_; }
    std::size_t leaves() const { return (nodes_.size() + 1) / 2; }

    /// Internal nodes in postorder (children before parents, left subtree first).
    std::vector<std::size_t> postorder_internal() const {
        std::vector<std::size_t> out;
        std::vector<std::pair<std::size_t, bool>> stack{{root_, false}};
        while (!stack.empty()) {
            auto [v, expanded] = stack.back();
            stack.pop_back();
            const TreeNode &nd = nodes_[v];
            if (nd.leaf) {
                continue;
            }
            if (expanded) {
                out.push_back(v);
            } else {
                stack.push_back({v, true});
                stack.push_back({nd.right, false});
                stack.push_back({nd.left, false});
            }
        }
        return out;
    }

private:
    void validate() const {
        if (nodes_.empty() || root_ >= nodes_.size()) {
            throw MalformedTree("tree has no root");
        }
        std::vector<int> parents(nodes_.size(), 0);
        std::size_t leaf_count = 0;
        for (const auto &nd : nodes_) {
            if (nd.leaf) {
                leaf_count++;
                continue;
            }
            if (nd.left >= nodes_.size() || nd.right >= nodes_.size() || nd.left == nd.right) {
                throw MalformedTree("internal node needs two distinct children");
            }
            parents[nd.left]++;
            parents[nd.right]++;
        }
        if (2 * leaf_count != nodes_.size() + 1) {
            throw MalformedTree("not a proper binary tree");
        }
        std::vector<bool> seen(leaf_count, false);
        for (std::size_t i = 0; i < nodes_.size(); i++) {
            if (parents[i] != (i == root_ ? 0 : 1)) {
                throw MalformedTree("node reachable zero or several times");
            }
            if (nodes_[i].leaf) {
                Wire l = nodes_[i].label;
                if (l >= leaf_count || seen[l]) {
                    throw MalformedTree("leaf labels must be a permutation of 0..n-1");
                }
                seen[l] = true;
            }
        }
        // Every node has exactly one parent, but a cycle detached from the root would still pass.
        std::size_t reached = 0;
        std::vector<std::size_t> stack{root_};
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            reached++;
            if (!nodes_[v].leaf) {
                stack.push_back(nodes_[v].left);
                stack.push_back(nodes_[v].right);
            }
            if (reached > nodes_.size()) {
                break;
            }
        }
        if (reached != nodes_.size()) {
            throw MalformedTree("tree is not connected");
        }
    }

    std::vector<TreeNode> nodes_;
    std::size_t root_ = 0;
};

/// Parses `(L a b)` / `(R a b)` / decimal leaf labels; whitespace is free.
inline CnotTree parse_tree(const std::string &text) {
    std::vector<TreeNode> nodes;
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            pos++;
        }
    };
    // Explicit stack of partially read internal nodes keeps deep paths off the call stack.
    struct Frame {
        std::size_t node;
        int filled;
    };
    std::vector<Frame> open;
    std::size_t root = TreeNode::kNone;
    auto attach = [&](std::size_t child) {
        if (open.empty()) {
            if (root != TreeNode::kNone) {
                throw ParseError("tree: trailing input");
            }
            root = child;
            return;
        }
        Frame &f = open.back();
        if (f.filled == 0) {
            nodes[f.node].left = child;
        } else if (f.filled == 1) {
            nodes[f.node].right = child;
        } else {
            throw ParseError("tree: internal node with more than two children");
        }
        f.filled++;
    };
    while (true) {
        skip();
        if (pos == text.size()) {
            break;
        }
        char ch = text[pos];
        if (ch == '(') {
            pos++;
            skip();
            if (pos == text.size() || (text[pos] != 'L' && text[pos] != 'R')) {
                throw ParseError("tree: expected L or R after '('");
            }
            TreeNode nd;
            nd.leaf = false;
            nd.side = text[pos] == 'L' ? Side::L : Side::R;
            pos++;
            nodes.push_back(nd);
            open.push_back({nodes.size() - 1, 0});
        } else if (ch == ')') {
            pos++;
            if (open.empty() || open.back().filled != 2) {
                throw ParseError("tree: internal node needs exactly two children");
            }
            std::size_t done = open.back().node;
            open.pop_back();
            attach(done);
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::uint64_t v = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                v = v * 10 + static_cast<std::uint64_t>(text[pos] - '0');
                if (v > 0xffffffffu) {
                    throw ParseError("tree: label too large");
                }
                pos++;
            }
            TreeNode nd;
            nd.label = static_cast<Wire>(v);
            nodes.push_back(nd);
            attach(nodes.size() - 1);
        } else {
            throw ParseError(std::string("tree: unexpected character '") + ch + "'");
        }
    }
    if (!open.empty() || root == TreeNode::kNone) {
        throw ParseError("tree: unbalanced or empty input");
    }
    return CnotTree(std::move(nodes), root);
}

inline std::string tree_to_string(const CnotTree &t) {
    std::string out;
    std::vector<std::pair<std::size_t, int>> stack{{t.root(), 0}};
    while (!stack.empty()) {
        auto &[v, state] = stack.back();
        const TreeNode &nd = t.node(v);
        if (nd.leaf) {
            out += std::to_string(nd.label);
            stack.pop_back();
        } else if (state == 0) {
            out += nd.side == Side::L ? "(L " : "(R ";
            state = 1;
            stack.push_back({nd.left, 0});
        } else if (state == 1) {
            out += ' ';
            state = 2;
            stack.push_back({nd.right, 0});
        } else {
            out += ')';
            stack.pop_back();
        }
    }
    return out;
}

/// One gate per internal node in postorder, one gate per layer.
inline Circuit tree_to_circuit_sequential(const CnotTree &t) {
    std::vector<Wire> qubit(t.nodes().size(), 0);
    Circuit out(t.leaves());
    for (std::size_t v = 0; v < t.nodes().size(); v++) {
        if (t.node(v).leaf) {
            qubit[v] = t.node(v).label;
        }
    }
    for (std::size_t v : t.postorder_internal()) {
        const TreeNode &nd = t.node(v);
        Wire a = qubit[nd.left], b = qubit[nd.right];
        if (nd.side == Side::L) {
            out.push_layer({{b, a}});
            qubit[v] = a;
        } else {
            out.push_layer({{a, b}});
            qubit[v] = b;
        }
    }
    return out;
}

/// Up-sweep / down-sweep network: wire j ends with x_0 ^ ... ^ x_j. Depth 2 log2 n - 1 when n is a
/// power of two, below 2 ceil(log2 n) otherwise.
inline Circuit prefix_circuit(std::size_t n) {
    Circuit out(n);
    if (n < 2) {
        return out;
    }
    std::size_t m = static_cast<std::size_t>(std::bit_width(n - 1));
    // Positions are 1-based in the loops; wire = position - 1.
    for (std::size_t j = 1; j <= m; j++) {
        std::vector<CnotGate> layer;
        std::size_t step = std::size_t{1} << j;
        for (std::size_t base = 0; base + step <= n; base += step) {
            layer.push_back({static_cast<Wire>(base + step / 2 - 1), static_cast<Wire>(base + step - 1)});
        }
        out.push_layer(std::move(layer));
    }
    for (std::size_t j = m - 1; j >= 1; j--) {
        std::vector<CnotGate> layer;
        std::size_t step = std::size_t{1} << j;
        for (std::size_t base = step; base + step / 2 <= n; base += step) {
            layer.push_back({static_cast<Wire>(base - 1), static_cast<Wire>(base + step / 2 - 1)});
        }
        out.push_layer(std::move(layer));
    }
    return out;
}

namespace detail {

/// target ^= XOR of sources, every source restored: pairwise reduction, one add, reduction undone.
inline std::vector<Layer> fan_in_layers(const std::vector<Wire> &sources, Wire target) {
    std::vector<Layer> up;
    for (std::size_t stride = 1; stride < sources.size(); stride *= 2) {
        std::vector<CnotGate> gates;
        for (std::size_t i = 0; i + stride < sources.size(); i += 2 * stride) {
            gates.push_back({sources[i + stride], sources[i]});
        }
        up.emplace_back(std::move(gates));
    }
    std::vector<Layer> out = up;
    if (!sources.empty()) {
        out.emplace_back(std::vector<CnotGate>{{sources[0], target}});
    }
    out.insert(out.end(), up.rbegin(), up.rend());
    return out;
}

struct HookEntry {
    Wire qubit;
    bool slot;  // the entry's leaf becomes the accumulator from here upward
};

}  // namespace detail

struct ContractStats {
    std::size_t rounds = 0;
    std::size_t rakes = 0;
    std::size_t compressed_chains = 0;
};

/// Rake / compress contraction. Rake resolves every node whose two children are resolved (one
/// layer of gates). Compress removes every maximal chain of nodes with exactly one resolved child
/// and records it, bottom-up, as a hook on the chain's lower end. When that node resolves, its hook
/// is emitted as a segmented fan-in (non-accumulator leaves into the accumulator of their segment)
/// followed by a prefix network over the accumulators. Blocks are appended in resolution order and
/// the result is ASAP-compacted.
inline Circuit contract_tree(const CnotTree &t, ContractStats *stats = nullptr) {
    const std::size_t nn = t.nodes().size();
    constexpr std::size_t kNone = TreeNode::kNone;
    ContractStats st;
    Circuit out(t.leaves());
    std::vector<std::size_t> kid0(nn, kNone), kid1(nn, kNone), parent(nn, kNone);
    std::vector<bool> resolved(nn, false);
    std::vector<Wire> qubit(nn, 0);
    std::vector<std::vector<detail::HookEntry>> hook(nn);
    for (std::size_t v = 0; v < nn; v++) {
        const TreeNode &nd = t.node(v);
        if (nd.leaf) {
            resolved[v] = true;
            qubit[v] = nd.label;
        } else {
            kid0[v] = nd.left;
            kid1[v] = nd.right;
            parent[nd.left] = parent[nd.right] = v;
        }
    }
    std::size_t root = t.root();

    auto emit_hook = [&](std::size_t v) {
        auto &h = hook[v];
        if (h.empty()) {
            return;
        }
        std::vector<Wire> slots{qubit[v]};
        std::vector<std::vector<Wire>> downs(1);
        for (const auto &e : h) {
            if (e.slot) {
                slots.push_back(e.qubit);
                downs.emplace_back();
            } else {
                downs.back().push_back(e.qubit);
            }
        }
        for (std::size_t i = 0; i < slots.size(); i++) {
            for (const auto &l : detail::fan_in_layers(downs[i], slots[i])) {
                out.push_layer(l);
            }
        }
        Circuit pre = prefix_circuit(slots.size());
        out.append(relabel(pre, slots, out.wires(), out.data()));
        qubit[v] = slots.back();
        h.clear();
        h.shrink_to_fit();
    };

    std::vector<std::size_t> alive;
    for (std::size_t v = 0; v < nn; v++) {
        if (!t.node(v).leaf) {
            alive.push_back(v);
        }
    }
    while (!resolved[root]) {
        st.rounds++;
        // Rake.
        std::vector<std::size_t> rake;
        for (std::size_t v : alive) {
            if (!resolved[v] && resolved[kid0[v]] && resolved[kid1[v]]) {
                rake.push_back(v);
            }
        }
        for (std::size_t v : rake) {
            Wire a = qubit[kid0[v]], b = qubit[kid1[v]];
            bool keep_left = t.node(v).side == Side::L;
            out.push_layer({keep_left ? CnotGate{b, a} : CnotGate{a, b}});
            qubit[v] = keep_left ? a : b;
            resolved[v] = true;
            st.rakes++;
            emit_hook(v);
        }
        if (resolved[root]) {
            break;
        }
        // Compress.
        auto is_chain = [&](std::size_t v) {
            return v != kNone && !resolved[v] && (resolved[kid0[v]] != resolved[kid1[v]]);
        };
        std::vector<bool> removed(nn, false);
        for (std::size_t top : alive) {
            if (resolved[top] || removed[top] || !is_chain(top) || is_chain(parent[top])) {
                continue;
            }
            std::vector<std::size_t> chain;
            std::size_t cur = top;
            while (is_chain(cur)) {
                chain.push_back(cur);
                cur = resolved[kid0[cur]] ? kid1[cur] : kid0[cur];
            }
            std::size_t w = cur;
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                std::size_t v = *it;
                bool leaf_is_left = resolved[kid0[v]];
                std::size_t leafkid = leaf_is_left ? kid0[v] : kid1[v];
                bool acc_left = t.node(v).side == Side::L;
                hook[w].push_back({qubit[leafkid], acc_left == leaf_is_left});
                hook[w].insert(hook[w].end(), hook[v].begin(), hook[v].end());
                hook[v].clear();
                removed[v] = true;
            }
            // w inherits top's place under top's parent, keeping top's side slot.
            std::size_t p = parent[top];
            parent[w] = p;
            if (p == kNone) {
                root = w;
            } else if (kid0[p] == top) {
                kid0[p] = w;
            } else {
                kid1[p] = w;
            }
            st.compressed_chains++;
        }
        std::vector<std::size_t> next;
        for (std::size_t v : alive) {
            if (!resolved[v] && !removed[v]) {
                next.push_back(v);
            }
        }
        alive = std::move(next);
    }
    if (stats) {
        *stats = st;
    }
    return compact_layers(out);
}

/// Uniform random proper binary tree with n leaves (Remy's growth process), a uniformly random
/// labelling and independent fair L/R labels.
inline CnotTree random_tree(std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw MalformedTree("random_tree: n must be positive");
    }
    std::mt19937_64 rng(seed);
    std::vector<TreeNode> nodes(1);
    std::vector<std::size_t> parent{TreeNode::kNone};
    std::size_t root = 0;
    for (std::size_t i = 1; i < n; i++) {
        std::size_t x = std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng);
        std::size_t leaf = nodes.size();
        nodes.push_back(TreeNode{});
        parent.push_back(TreeNode::kNone);
        std::size_t in = nodes.size();
        TreeNode nd;
        nd.leaf = false;
        nd.side = rng() & 1 ? Side::R : Side::L;
        bool leaf_left = rng() & 1;
        nd.left = leaf_left ? leaf : x;
        nd.right = leaf_left ? x : leaf;
        nodes.push_back(nd);
        parent.push_back(parent[x]);
        if (parent[x] == TreeNode::kNone) {
            root = in;
        } else {
            TreeNode &p = nodes[parent[x]];
            (p.left == x ? p.left : p.right) = in;
        }
        parent[x] = parent[leaf] = in;
    }
    std::vector<Wire> labels(n);
    std::iota(labels.begin(), labels.end(), Wire{0});
    std::shuffle(labels.begin(), labels.end(), rng);
    std::size_t next = 0;
    for (auto &nd : nodes) {
        if (nd.leaf) {
            nd.label = labels[next++];
        }
    }
    return CnotTree(std::move(nodes), root);
}

/// The path (L n-1 (L n-2 ( ... (L 1 0)))): wire j accumulates x_0 ^ ... ^ x_j.
inline CnotTree prefix_tree(std::size_t n) {
    if (n == 0) {
        throw MalformedTree("prefix_tree: n must be positive");
    }
    std::vector<TreeNode> nodes{TreeNode{true, 0, Side::L}};
    std::size_t below = 0;
    for (std::size_t j = 1; j < n; j++) {
        nodes.push_back(TreeNode{true, static_cast<Wire>(j), Side::L});
        TreeNode in;
        in.leaf = false;
        in.side = Side::L;
        in.left = nodes.size() - 1;
        in.right = below;
        nodes.push_back(in);
        below = nodes.size() - 1;
    }
    return CnotTree(std::move(nodes), below);
}

}  // namespace parcnot
