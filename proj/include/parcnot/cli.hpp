#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"

#include "parcnot/bounds.hpp"
#include "parcnot/circuit.hpp"
#include "parcnot/errors.hpp"
#include "parcnot/f2matrix.hpp"
#include "parcnot/synth_ancilla.hpp"
#include "parcnot/synth_free.hpp"
#include "parcnot/trees.hpp"

namespace parcnot {

/// Exit statuses shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitSingular = 2, kExitVerify = 3 };

/// One benchmark cell. `s` is 0 for methods without an ancilla scale.
struct BenchRecord {
    std::string method;
    std::size_t n = 0;
    std::size_t s = 0;
    std::size_t ancillae = 0;
    std::size_t depth = 0;
    std::size_t size = 0;
    std::size_t counting_bound = 0;
    std::size_t fanin_bound = 0;
    double ms = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const BenchRecord &) const = default;
};

inline const char *bench_csv_header() {
    return "method,n,s,ancillae,depth,size,counting_bound,fanin_bound,ms,seed";
}

inline void emit_csv(std::ostream &out, const std::vector<BenchRecord> &rows) {
    out << bench_csv_header() << '\n';
    for (const auto &r : rows) {
        std::ostringstream ms;
        ms << std::fixed << std::setprecision(3) << r.ms;
        out << r.method << ',' << r.n << ',' << r.s << ',' << r.ancillae << ',' << r.depth << ',' << r.size << ','
            << r.counting_bound << ',' << r.fanin_bound << ',' << ms.str() << ',' << r.seed << '\n';
    }
}

inline std::vector<BenchRecord> parse_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != bench_csv_header()) {
        throw ParseError("bench csv: missing or unexpected header");
    }
    std::vector<BenchRecord> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != 10) {
            throw ParseError("bench csv: expected 10 fields, got " + std::to_string(f.size()));
        }
        try {
            BenchRecord r;
            r.method = f[0];
            r.n = std::stoull(f[1]);
            r.s = std::stoull(f[2]);
            r.ancillae = std::stoull(f[3]);
            r.depth = std::stoull(f[4]);
            r.size = std::stoull(f[5]);
            r.counting_bound = std::stoull(f[6]);
            r.fanin_bound = std::stoull(f[7]);
            r.ms = std::stod(f[8]);
            r.seed = std::stoull(f[9]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error &) {
            throw ParseError("bench csv: bad number in line: " + line);
        }
    }
    return rows;
}

namespace detail {

inline double log2_big(const BigCount &x) {
    std::size_t top = boost::multiprecision::msb(x);
    if (top < 62) {
        return std::log2(static_cast<double>(static_cast<std::uint64_t>(x)));
    }
    BigCount head = x >> (top - 62);
    return static_cast<double>(top - 62) + std::log2(static_cast<double>(static_cast<std::uint64_t>(head)));
}

}  // namespace detail

/// counting_depth_bound, exact for n + m <= 64; above that the ratio log|GL| / log(#layers) is taken
/// in floating point and rounded down on near-ties, so the result never overstates the bound.
inline std::size_t counting_bound_fast(std::size_t n, std::size_t m) {
    if (n + m <= 64) {
        return counting_depth_bound(n, m);
    }
    double lg_gl = 0.0;
    for (std::size_t i = 0; i < n; i++) {
        lg_gl += static_cast<double>(n) + std::log1p(-std::ldexp(1.0, static_cast<int>(i) - static_cast<int>(n))) / std::log(2.0);
    }
    double ratio = lg_gl / detail::log2_big(layer_count(n + m));
    return static_cast<std::size_t>(std::ceil(ratio - 1e-9));
}

namespace detail {

struct CliError {
    int code;
    std::string message;
};

inline F2Matrix load_matrix(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw CliError{kExitIo, "cannot open " + path};
    }
    return read_matrix(f);
}

inline Circuit load_circuit(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw CliError{kExitIo, "cannot open " + path};
    }
    return read_circuit(f);
}

inline CnotTree load_tree(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw CliError{kExitIo, "cannot open " + path};
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_tree(ss.str());
}

template <class Fn>
inline void save(const std::string &path, std::ostream &fallback, Fn &&write) {
    if (path.empty() || path == "-") {
        write(fallback);
        return;
    }
    std::ofstream f(path);
    if (!f) {
        throw CliError{kExitIo, "cannot write " + path};
    }
    write(f);
}

inline bool is_tree_method(const std::string &m) { return m == "tree-seq" || m == "tree-contract"; }

inline Circuit synth_matrix(const std::string &method, const F2Matrix &m, std::size_t s, std::uint64_t seed) {
    if (method == "simple") {
        return synth_simple(m);
    }
    if (method == "dnc") {
        DncOptions opt;
        opt.seed = seed;
        return synth_dnc(m, opt);
    }
    if (method == "ancilla") {
        return synth_with_ancillae(m, s);
    }
    throw CliError{kExitIo, "unknown method " + method};
}

inline Circuit synth_tree(const std::string &method, const CnotTree &t) {
    return method == "tree-seq" ? tree_to_circuit_sequential(t) : contract_tree(t);
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt_ms(double ms) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << ms;
    return ss.str();
}

}  // namespace detail

/// Runs one command line. Output goes to `out`, diagnostics to `err`; the return value is the exit
/// status.
inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Layered CNOT circuit synthesis"};
    app.require_subcommand(1);

    std::string in, out_path, circuit_path, method = "simple", kind = "gl", csv;
    std::size_t scale = 1, n = 0, m = 0;
    std::uint64_t seed = 0;
    bool verify = false, verify_seq = false;
    std::vector<std::size_t> sizes{64}, scales{1};
    std::vector<std::string> methods{"simple"};
    std::vector<std::uint64_t> seeds{0};

    auto *synth = app.add_subcommand("synth", "synthesize a matrix or tree into a layered circuit");
    synth->add_option("--in", in, "matrix file (tree file for tree methods)")->required();
    synth->add_option("--out", out_path, "circuit output file");
    synth->add_option("--method", method)->check(CLI::IsMember({"simple", "dnc", "ancilla", "tree-seq", "tree-contract"}));
    synth->add_option("--ancilla-scale", scale)->check(CLI::PositiveNumber);
    synth->add_option("--seed", seed);
    synth->add_flag("--verify", verify);

    auto *ver = app.add_subcommand("verify", "check a circuit against a matrix");
    ver->add_option("--in", in, "matrix file")->required();
    ver->add_option("--circuit", circuit_path, "circuit file")->required();

    auto *bnd = app.add_subcommand("bounds", "lower bounds and counts");
    bnd->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    bnd->add_option("--m", m);
    bnd->add_option("--in", in, "optional matrix for the fan-in bound");

    auto *orc = app.add_subcommand("oracle", "exact minimum depth for n <= 4");
    orc->add_option("--in", in)->required();

    auto *rnd = app.add_subcommand("random", "write a seeded random instance");
    rnd->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    rnd->add_option("--kind", kind)->check(CLI::IsMember({"gl", "lower", "upper", "tree"}));
    rnd->add_option("--seed", seed);
    rnd->add_option("--out", out_path);

    auto *tre = app.add_subcommand("tree", "synthesize a CNOT tree");
    tre->add_option("--in", in)->required();
    tre->add_option("--method", method)->check(CLI::IsMember({"sequential", "contract", "tree-seq", "tree-contract"}));
    tre->add_option("--out", out_path);
    tre->add_flag("--verify-against-sequential", verify_seq);

    auto *bench = app.add_subcommand("bench", "benchmark methods over sizes and seeds");
    bench->add_option("--sizes", sizes)->delimiter(',');
    bench->add_option("--methods", methods)->delimiter(',')->check(
        CLI::IsMember({"simple", "dnc", "ancilla", "tree-seq", "tree-contract"}));
    bench->add_option("--seeds", seeds)->delimiter(',');
    bench->add_option("--scale", scales, "ancilla scales")->delimiter(',');
    bench->add_option("--csv", csv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitIo;
    }

    try {
        if (synth->parsed()) {
            auto t0 = std::chrono::steady_clock::now();
            Circuit c;
            std::size_t fanin = 0;
            bool ok = true;
            if (detail::is_tree_method(method)) {
                CnotTree t = detail::load_tree(in);
                c = detail::synth_tree(method, t);
                double ms = detail::elapsed_ms(t0);
                if (verify) {
                    ok = simulate_to_matrix(c) == simulate_to_matrix(tree_to_circuit_sequential(t));
                }
                fanin = fanin_depth_bound(simulate_to_matrix(c));
                out << "method=" << method << " n=" << c.data() << " wires=" << c.wires() << " ancillae=0"
                    << " depth=" << c.depth() << " size=" << c.size()
                    << " counting_bound=" << counting_bound_fast(c.data(), 0) << " fanin_bound=" << fanin
                    << " ms=" << detail::fmt_ms(ms);
            } else {
                F2Matrix mat = detail::load_matrix(in);
                c = detail::synth_matrix(method, mat, scale, seed);
                double ms = detail::elapsed_ms(t0);
                if (verify) {
                    ok = verify_implements(c, mat).ok;
                }
                out << "method=" << method << " n=" << c.data() << " wires=" << c.wires()
                    << " ancillae=" << c.ancillae() << " depth=" << c.depth() << " size=" << c.size()
                    << " counting_bound=" << counting_bound_fast(c.data(), c.ancillae())
                    << " fanin_bound=" << fanin_depth_bound(mat) << " ms=" << detail::fmt_ms(ms);
            }
            if (verify) {
                out << " verify=" << (ok ? "ok" : "fail");
            }
            out << '\n';
            if (!out_path.empty()) {
                detail::save(out_path, out, [&](std::ostream &o) { write_circuit(o, c); });
            }
            return ok ? kExitOk : kExitVerify;
        }
        if (ver->parsed()) {
            F2Matrix mat = detail::load_matrix(in);
            Circuit c = detail::load_circuit(circuit_path);
            VerifyReport r = verify_implements(c, mat);
            out << "verify=" << (r.ok ? "ok" : "fail") << " top_left=" << (r.top_left_match ? 1 : 0)
                << " ancilla_restored=" << (r.ancilla_restored ? 1 : 0) << " depth=" << c.depth() << '\n';
            return r.ok ? kExitOk : kExitVerify;
        }
        if (bnd->parsed()) {
            out << "gl_count=" << gl_count(n) << '\n';
            out << "layer_count=" << layer_count(n + m) << '\n';
            out << "counting_bound=" << counting_bound_fast(n, m) << '\n';
            if (!in.empty()) {
                out << "fanin_bound=" << fanin_depth_bound(detail::load_matrix(in)) << '\n';
            }
            return kExitOk;
        }
        if (orc->parsed()) {
            F2Matrix mat = detail::load_matrix(in);
            out << "bfs_depth=" << bfs_optimal_depth(mat) << '\n';
            return kExitOk;
        }
        if (rnd->parsed()) {
            if (kind == "tree") {
                std::string s = tree_to_string(random_tree(n, seed));
                detail::save(out_path, out, [&](std::ostream &o) { o << s << '\n'; });
            } else {
                F2Matrix mat = kind == "gl" ? random_gl(n, seed)
                               : kind == "lower" ? random_unit_lower(n, seed)
                                                 : random_unit_upper(n, seed);
                detail::save(out_path, out, [&](std::ostream &o) { write_matrix(o, mat); });
            }
            return kExitOk;
        }
        if (tre->parsed()) {
            CnotTree t = detail::load_tree(in);
            bool contract = method == "contract" || method == "tree-contract";
            Circuit c = contract ? contract_tree(t) : tree_to_circuit_sequential(t);
            bool ok = true;
            out << "method=" << (contract ? "tree-contract" : "tree-seq") << " n=" << c.data()
                << " depth=" << c.depth() << " size=" << c.size();
            if (verify_seq) {
                ok = simulate_to_matrix(c) == simulate_to_matrix(tree_to_circuit_sequential(t));
                out << " verify=" << (ok ? "ok" : "fail");
            }
            out << '\n';
            if (!out_path.empty()) {
                detail::save(out_path, out, [&](std::ostream &o) { write_circuit(o, c); });
            }
            return ok ? kExitOk : kExitVerify;
        }
        if (bench->parsed()) {
            std::vector<BenchRecord> rows;
            for (const auto &meth : methods) {
                for (std::size_t size : sizes) {
                    for (std::size_t s : meth == "ancilla" ? scales : std::vector<std::size_t>{0}) {
                        for (std::uint64_t sd : seeds) {
                            BenchRecord r;
                            r.method = meth;
                            r.n = size;
                            r.seed = sd;
                            auto t0 = std::chrono::steady_clock::now();
                            Circuit c;
                            if (detail::is_tree_method(meth)) {
                                CnotTree t = random_tree(size, sd);
                                t0 = std::chrono::steady_clock::now();
                                c = detail::synth_tree(meth, t);
                                r.ms = detail::elapsed_ms(t0);
                                r.fanin_bound = fanin_depth_bound(simulate_to_matrix(c));
                            } else {
                                F2Matrix mat = random_gl(size, sd);
                                t0 = std::chrono::steady_clock::now();
                                c = detail::synth_matrix(meth, mat, std::max<std::size_t>(s, 1), sd);
                                r.ms = detail::elapsed_ms(t0);
                                r.fanin_bound = fanin_depth_bound(mat);
                                if (meth == "ancilla") {
                                    r.s = AncillaLayout::make(size, s).s;
                                }
                            }
                            r.ancillae = c.ancillae();
                            r.depth = c.depth();
                            r.size = c.size();
                            r.counting_bound = counting_bound_fast(size, r.ancillae);
                            rows.push_back(std::move(r));
                        }
                    }
                }
            }
            std::stable_sort(rows.begin(), rows.end(), [](const BenchRecord &a, const BenchRecord &b) {
                return std::tie(a.method, a.n, a.s, a.seed) < std::tie(b.method, b.n, b.s, b.seed);
            });
            if (csv.empty()) {
                emit_csv(out, rows);
            } else {
                detail::save(csv, out, [&](std::ostream &o) { emit_csv(o, rows); });
                out << "rows=" << rows.size() << " csv=" << csv << '\n';
            }
            return kExitOk;
        }
    } catch (const detail::CliError &e) {
        err << "error: " << e.message << '\n';
        return e.code;
    } catch (const SingularMatrix &e) {
        err << "error: " << e.what() << '\n';
        return kExitSingular;
    } catch (const TooLarge &e) {
        err << "error: " << e.what() << '\n';
        return kExitSingular;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitIo;
}

}  // namespace parcnot
