#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "parcnot/errors.hpp"
#include "parcnot/f2matrix.hpp"

namespace parcnot {

using Wire = std::uint32_t;

/// CNOT(control -> target): x_target ^= x_control, i.e. the row-elimination matrix I + 1_{target,control}.
struct CnotGate {
    Wire control;
    Wire target;

    bool operator==(const CnotGate &) const = default;
};

/// One unit of depth: CNOTs on pairwise disjoint wires. Validated on construction.
class Layer {
   public:
    Layer() = default;

    explicit Layer(std::vector<CnotGate> gates) : gates_(std::move(gates)) { validate(); }

    const std::vector<CnotGate> &gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    Wire max_wire() const {
        Wire m = 0;
        for (const auto &g : gates_) {
            m = std::max({m, g.control, g.target});
        }
        return m;
    }

    bool operator==(const Layer &other) const {
        auto a = gates_;
        auto b = other.gates_;
        auto key = [](const CnotGate &g) { return std::pair(g.control, g.target); };
        std::sort(a.begin(), a.end(), [&](auto &x, auto &y) { return key(x) < key(y); });
        std::sort(b.begin(), b.end(), [&](auto &x, auto &y) { return key(x) < key(y); });
        return a == b;
    }

   private:
    void validate() const {
        // Stamp table reused across calls; a wire collides if it already carries this call's stamp.
        thread_local std::vector<std::uint64_t> stamp;
        thread_local std::uint64_t epoch = 0;
        epoch++;
        for (const auto &g : gates_) {
            if (g.control == g.target) {
                throw MalformedLayer("gate uses wire " + std::to_string(g.control) + " as control and target");
            }
            for (Wire w : {g.control, g.target}) {
                if (w >= stamp.size()) {
                    stamp.resize(static_cast<std::size_t>(w) + 1, 0);
                }
                if (stamp[w] == epoch) {
                    throw MalformedLayer("wire " + std::to_string(w) + " appears twice in one layer");
                }
                stamp[w] = epoch;
            }
        }
    }

    std::vector<CnotGate> gates_;
};

/// Ordered list of layers on `wires()` wires, the first `data()` of which carry input; the rest are
/// ancillae that start at zero. Layer 0 acts first, so the circuit matrix is R_{d-1} ... R_1 R_0.
class Circuit {
   public:
    Circuit() = default;

    explicit Circuit(std::size_t wires) : Circuit(wires, wires) {}

    Circuit(std::size_t wires, std::size_t data) : wires_(wires), data_(data) {
        if (data > wires) {
            throw DimensionMismatch("circuit: more data wires than wires");
        }
    }

    std::size_t wires() const { return wires_; }
    std::size_t data() const { return data_; }
    std::size_t ancillae() const { return wires_ - data_; }
    std::size_t depth() const { return layers_.size(); }

    std::size_t size() const {
        std::size_t total = 0;
        for (const auto &l : layers_) {
            total += l.size();
        }
        return total;
    }

    const std::vector<Layer> &layers() const { return layers_; }

    /// Appends a layer; empty layers are dropped so depth only counts nontrivial layers.
    void push_layer(Layer layer) {
        if (layer.empty()) {
            return;
        }
        if (layer.max_wire() >= wires_) {
            throw MalformedLayer("layer touches wire " + std::to_string(layer.max_wire()) + " but circuit has " +
                                 std::to_string(wires_) + " wires");
        }
        layers_.push_back(std::move(layer));
    }

    void push_layer(std::vector<CnotGate> gates) { push_layer(Layer(std::move(gates))); }

    /// Appends every layer of `other`, which must have the same wire count.
    void append(const Circuit &other) {
        if (other.wires_ != wires_) {
            throw DimensionMismatch("append: wire counts differ");
        }
        for (const auto &l : other.layers_) {
            layers_.push_back(l);
        }
    }

    /// Validates every layer against the wire range; useful after parsing.
    void check() const {
        for (const auto &l : layers_) {
            if (!l.empty() && l.max_wire() >= wires_) {
                throw MalformedLayer("gate outside wire range");
            }
        }
    }

    std::vector<bool> touched_wires() const {
        std::vector<bool> t(wires_, false);
        for (const auto &l : layers_) {
            for (const auto &g : l.gates()) {
                t[g.control] = true;
                t[g.target] = true;
            }
        }
        return t;
    }

    bool operator==(const Circuit &) const = default;

   private:
    std::size_t wires_ = 0;
    std::size_t data_ = 0;
    std::vector<Layer> layers_;
};

/// Applies the circuit's row operations to `target`, whose rows are indexed by wire.
inline void apply_rows(const Circuit &c, F2Matrix &target) {
    if (target.rows() != c.wires()) {
        throw DimensionMismatch("apply_rows: matrix rows differ from circuit wires");
    }
    for (const auto &l : c.layers()) {
        for (const auto &g : l.gates()) {
            target.xor_row(g.target, g.control);
        }
    }
}

/// The N x N matrix of the circuit, built by running every gate on the identity.
inline F2Matrix simulate_to_matrix(const Circuit &c) {
    F2Matrix m = F2Matrix::identity(c.wires());
    apply_rows(c, m);
    return m;
}

/// The first `data()` columns of the circuit matrix: the only part that matters for inputs
/// of the form (x, 0).
inline F2Matrix simulate_data_columns(const Circuit &c) {
    F2Matrix m(c.wires(), c.data());
    for (std::size_t i = 0; i < c.data(); i++) {
        m.set(i, i, true);
    }
    apply_rows(c, m);
    return m;
}

/// Direct bit-vector simulation of the circuit on one input.
inline std::vector<bool> simulate_vector(const Circuit &c, std::vector<bool> state) {
    if (state.size() != c.wires()) {
        throw DimensionMismatch("simulate_vector: state length differs from wire count");
    }
    for (const auto &l : c.layers()) {
        for (const auto &g : l.gates()) {
            if (state[g.control]) {
                state[g.target] = !state[g.target];
            }
        }
    }
    return state;
}

struct VerifyReport {
    bool ok = false;
    bool top_left_match = false;
    bool ancilla_restored = false;
};

/// Checks that the circuit maps (x, 0^m) to (M x, 0^m) for every x.
inline VerifyReport verify_implements(const Circuit &c, const F2Matrix &m) {
    if (!m.square() || m.rows() != c.data()) {
        throw DimensionMismatch("verify_implements: matrix is not data x data");
    }
    F2Matrix s = simulate_data_columns(c);
    VerifyReport r;
    r.top_left_match = true;
    for (std::size_t i = 0; i < c.data() && r.top_left_match; i++) {
        auto got = s.row(i);
        auto want = m.row(i);
        r.top_left_match = std::equal(got.begin(), got.end(), want.begin());
    }
    r.ancilla_restored = true;
    for (std::size_t i = c.data(); i < c.wires() && r.ancilla_restored; i++) {
        r.ancilla_restored = s.row_is_zero(i);
    }
    r.ok = r.top_left_match && r.ancilla_restored;
    return r;
}

/// Layer-wise union of two schedules on disjoint wire sets.
inline Circuit merge_independent_schedules(const Circuit &a, const Circuit &b) {
    if (a.wires() != b.wires()) {
        throw DimensionMismatch("merge: wire counts differ");
    }
    auto ta = a.touched_wires();
    auto tb = b.touched_wires();
    for (std::size_t w = 0; w < ta.size(); w++) {
        if (ta[w] && tb[w]) {
            throw WireCollision("merge: both schedules touch wire " + std::to_string(w));
        }
    }
    Circuit out(a.wires(), a.data());
    std::size_t d = std::max(a.depth(), b.depth());
    for (std::size_t k = 0; k < d; k++) {
        std::vector<CnotGate> gates;
        if (k < a.depth()) {
            gates = a.layers()[k].gates();
        }
        if (k < b.depth()) {
            const auto &bg = b.layers()[k].gates();
            gates.insert(gates.end(), bg.begin(), bg.end());
        }
        out.push_layer(std::move(gates));
    }
    return out;
}

/// Every layer is an involution, so reversing the layer order inverts the circuit.
inline Circuit invert_circuit(const Circuit &c) {
    Circuit out(c.wires(), c.data());
    for (auto it = c.layers().rbegin(); it != c.layers().rend(); ++it) {
        out.push_layer(*it);
    }
    return out;
}

inline Circuit concat(const Circuit &a, const Circuit &b) {
    Circuit out = a;
    out.append(b);
    return out;
}

/// Renames wires: wire w of `c` becomes wire map[w] of a circuit on `wires` wires.
inline Circuit relabel(const Circuit &c, const std::vector<Wire> &map, std::size_t wires, std::size_t data) {
    if (map.size() != c.wires()) {
        throw DimensionMismatch("relabel: map size differs from wire count");
    }
    Circuit out(wires, data);
    for (const auto &l : c.layers()) {
        std::vector<CnotGate> gates;
        gates.reserve(l.size());
        for (const auto &g : l.gates()) {
            gates.push_back({map[g.control], map[g.target]});
        }
        out.push_layer(std::move(gates));
    }
    return out;
}

/// As-soon-as-possible rescheduling: each gate moves to the earliest layer after the last gate on
/// either of its wires. Gates on disjoint wires commute, so the circuit matrix is unchanged and the
/// depth never grows.
inline Circuit compact_layers(const Circuit &c) {
    std::vector<std::size_t> ready(c.wires(), 0);
    std::vector<std::vector<CnotGate>> slots;
    for (const auto &l : c.layers()) {
        for (const auto &g : l.gates()) {
            std::size_t at = std::max(ready[g.control], ready[g.target]);
            if (at == slots.size()) {
                slots.emplace_back();
            }
            slots[at].push_back(g);
            ready[g.control] = ready[g.target] = at + 1;
        }
    }
    Circuit out(c.wires(), c.data());
    for (auto &s : slots) {
        out.push_layer(std::move(s));
    }
    return out;
}

/// CNOTC v1 text format. Wire indices are 0-based; one line per layer of `c>t` pairs.
inline void write_circuit(std::ostream &out, const Circuit &c) {
    out << "CNOTC v1 wires=" << c.wires() << " data=" << c.data() << '\n';
    for (const auto &l : c.layers()) {
        bool first = true;
        for (const auto &g : l.gates()) {
            if (!first) {
                out << ' ';
            }
            first = false;
            out << g.control << '>' << g.target;
        }
        out << '\n';
    }
}

inline std::string circuit_to_string(const Circuit &c) {
    std::ostringstream ss;
    write_circuit(ss, c);
    return ss.str();
}

inline Circuit read_circuit(std::istream &in) {
    std::string line;
    auto strip = [](std::string &s) {
        auto hash = s.find('#');
        if (hash != std::string::npos) {
            s.erase(hash);
        }
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
            s.pop_back();
        }
    };
    bool have_header = false;
    Circuit out;
    while (std::getline(in, line)) {
        strip(line);
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::istringstream ss(line);
        if (!have_header) {
            std::string magic, version, wires_kv, data_kv, extra;
            ss >> magic >> version >> wires_kv >> data_kv;
            if (magic != "CNOTC" || version != "v1" || wires_kv.rfind("wires=", 0) != 0 ||
                data_kv.rfind("data=", 0) != 0 || (ss >> extra)) {
                throw ParseError("circuit: bad header '" + line + "'");
            }
            try {
                std::size_t pos = 0;
                unsigned long long n_wires = std::stoull(wires_kv.substr(6), &pos);
                if (pos != wires_kv.size() - 6) {
                    throw ParseError("circuit: bad wire count");
                }
                unsigned long long n_data = std::stoull(data_kv.substr(5), &pos);
                if (pos != data_kv.size() - 5) {
                    throw ParseError("circuit: bad data count");
                }
                out = Circuit(n_wires, n_data);
            } catch (const std::logic_error &) {
                throw ParseError("circuit: bad header '" + line + "'");
            }
            have_header = true;
            continue;
        }
        std::vector<CnotGate> gates;
        std::string tok;
        while (ss >> tok) {
            auto gt = tok.find('>');
            if (gt == std::string::npos || gt == 0 || gt + 1 == tok.size()) {
                throw ParseError("circuit: bad gate token '" + tok + "'");
            }
            try {
                std::size_t p1 = 0, p2 = 0;
                auto c = std::stoull(tok.substr(0, gt), &p1);
                auto t = std::stoull(tok.substr(gt + 1), &p2);
                if (p1 != gt || p2 != tok.size() - gt - 1) {
                    throw ParseError("circuit: bad gate token '" + tok + "'");
                }
                gates.push_back({static_cast<Wire>(c), static_cast<Wire>(t)});
            } catch (const std::logic_error &) {
                throw ParseError("circuit: bad gate token '" + tok + "'");
            }
        }
        out.push_layer(std::move(gates));
    }
    if (!have_header) {
        throw ParseError("circuit: missing header");
    }
    return out;
}

inline Circuit circuit_from_string(const std::string &s) {
    std::istringstream ss(s);
    return read_circuit(ss);
}

}  // namespace parcnot
