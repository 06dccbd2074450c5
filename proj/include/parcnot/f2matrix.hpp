#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "parcnot/errors.hpp"

namespace parcnot {

/// Dense matrix over GF(2), row-major, each row padded to a whole number of 64-bit words.
///
/// Bits beyond column `cols()` in every row are kept zero so that whole-word comparisons,
/// popcounts and XORs never see garbage.
class F2Matrix {
   public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    F2Matrix() = default;

    F2Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_((cols + kWordBits - 1) / kWordBits), words_(rows * stride_, 0) {
        if (rows == 0 || cols == 0) {
            throw DimensionMismatch("F2Matrix needs at least one row and one column");
        }
    }

    static F2Matrix identity(std::size_t n) {
        F2Matrix m(n, n);
        for (std::size_t i = 0; i < n; i++) {
            m.set(i, i, true);
        }
        return m;
    }

    /// Builds a matrix from rows of '0'/'1' characters. Handy in tests.
    static F2Matrix from_rows(const std::vector<std::string> &rows) {
        if (rows.empty()) {
            throw DimensionMismatch("from_rows: no rows");
        }
        F2Matrix m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); i++) {
            if (rows[i].size() != m.cols()) {
                throw DimensionMismatch("from_rows: ragged rows");
            }
            for (std::size_t j = 0; j < rows[i].size(); j++) {
                m.set(i, j, rows[i][j] == '1');
            }
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }
    bool square() const { return rows_ == cols_; }

    bool get(std::size_t i, std::size_t j) const {
        return (words_[i * stride_ + j / kWordBits] >> (j % kWordBits)) & 1;
    }

    void set(std::size_t i, std::size_t j, bool v) {
        Word &w = words_[i * stride_ + j / kWordBits];
        Word bit = Word{1} << (j % kWordBits);
        w = v ? (w | bit) : (w & ~bit);
    }

    void flip(std::size_t i, std::size_t j) { words_[i * stride_ + j / kWordBits] ^= Word{1} << (j % kWordBits); }

    std::span<Word> row(std::size_t i) { return {words_.data() + i * stride_, stride_}; }
    std::span<const Word> row(std::size_t i) const { return {words_.data() + i * stride_, stride_}; }

    /// row[dst] ^= row[src]; the basic CNOT / row-elimination step.
    void xor_row(std::size_t dst, std::size_t src) { xor_row_from(dst, src, 0); }

    /// row[dst] ^= row[src], touching only words from `first_word` on.
    void xor_row_from(std::size_t dst, std::size_t src, std::size_t first_word) {
        Word *d = words_.data() + dst * stride_;
        const Word *s = words_.data() + src * stride_;
        for (std::size_t w = first_word; w < stride_; w++) {
            d[w] ^= s[w];
        }
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) {
            return;
        }
        std::swap_ranges(words_.begin() + a * stride_, words_.begin() + (a + 1) * stride_, words_.begin() + b * stride_);
    }

    std::size_t row_weight(std::size_t i) const {
        std::size_t total = 0;
        for (Word w : row(i)) {
            total += std::popcount(w);
        }
        return total;
    }

    std::size_t col_weight(std::size_t j) const {
        std::size_t total = 0;
        for (std::size_t i = 0; i < rows_; i++) {
            total += get(i, j);
        }
        return total;
    }

    bool row_is_zero(std::size_t i) const {
        return std::all_of(row(i).begin(), row(i).end(), [](Word w) { return w == 0; });
    }

    bool is_zero() const {
        return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
    }

    bool is_identity() const {
        if (!square()) {
            return false;
        }
        for (std::size_t i = 0; i < rows_; i++) {
            auto r = row(i);
            for (std::size_t w = 0; w < stride_; w++) {
                Word expect = (w == i / kWordBits) ? (Word{1} << (i % kWordBits)) : 0;
                if (r[w] != expect) {
                    return false;
                }
            }
        }
        return true;
    }

    bool is_unit_lower_triangular() const {
        if (!square()) {
            return false;
        }
        for (std::size_t i = 0; i < rows_; i++) {
            if (!get(i, i)) {
                return false;
            }
            for (std::size_t j = i + 1; j < cols_; j++) {
                if (get(i, j)) {
                    return false;
                }
            }
        }
        return true;
    }

    bool is_unit_upper_triangular() const {
        if (!square()) {
            return false;
        }
        for (std::size_t i = 0; i < rows_; i++) {
            if (!get(i, i)) {
                return false;
            }
            for (std::size_t j = 0; j < i; j++) {
                if (get(i, j)) {
                    return false;
                }
            }
        }
        return true;
    }

    F2Matrix transposed() const {
        F2Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; i++) {
            for (std::size_t j = 0; j < cols_; j++) {
                if (get(i, j)) {
                    t.set(j, i, true);
                }
            }
        }
        return t;
    }

    F2Matrix block(std::size_t row0, std::size_t col0, std::size_t nrows, std::size_t ncols) const {
        if (row0 + nrows > rows_ || col0 + ncols > cols_) {
            throw DimensionMismatch("block out of range");
        }
        F2Matrix b(nrows, ncols);
        for (std::size_t i = 0; i < nrows; i++) {
            for (std::size_t j = 0; j < ncols; j++) {
                if (get(row0 + i, col0 + j)) {
                    b.set(i, j, true);
                }
            }
        }
        return b;
    }

    std::vector<bool> apply(const std::vector<bool> &x) const {
        if (x.size() != cols_) {
            throw DimensionMismatch("apply: vector length differs from column count");
        }
        std::vector<bool> y(rows_, false);
        for (std::size_t i = 0; i < rows_; i++) {
            bool acc = false;
            for (std::size_t j = 0; j < cols_; j++) {
                acc ^= get(i, j) && x[j];
            }
            y[i] = acc;
        }
        return y;
    }

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < rows_; i++) {
            for (std::size_t j = 0; j < cols_; j++) {
                out.push_back(get(i, j) ? '1' : '0');
            }
            out.push_back('\n');
        }
        return out;
    }

    bool operator==(const F2Matrix &other) const = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<Word> words_;
};

/// Product over GF(2).
inline F2Matrix mat_mul(const F2Matrix &a, const F2Matrix &b) {
    if (a.cols() != b.rows()) {
        throw DimensionMismatch("mat_mul: inner dimensions differ");
    }
    F2Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        auto dst = out.row(i);
        auto src = a.row(i);
        for (std::size_t w = 0; w < src.size(); w++) {
            F2Matrix::Word bits = src[w];
            while (bits) {
                std::size_t j = w * F2Matrix::kWordBits + std::countr_zero(bits);
                bits &= bits - 1;
                auto brow = b.row(j);
                for (std::size_t v = 0; v < dst.size(); v++) {
                    dst[v] ^= brow[v];
                }
            }
        }
    }
    return out;
}

inline std::size_t rank(F2Matrix m) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); c++) {
        std::size_t pivot = r;
        while (pivot < m.rows() && !m.get(pivot, c)) {
            pivot++;
        }
        if (pivot == m.rows()) {
            continue;
        }
        m.swap_rows(pivot, r);
        for (std::size_t i = r + 1; i < m.rows(); i++) {
            if (m.get(i, c)) {
                m.xor_row_from(i, r, c / F2Matrix::kWordBits);
            }
        }
        r++;
    }
    return r;
}

/// Row-pivoted factorisation m = P * lower * upper, where P is the permutation matrix with
/// P[i, perm[i]] = 1, i.e. row i of m equals row perm[i] of lower * upper.
struct PluFactors {
    std::vector<std::size_t> perm;
    F2Matrix lower;
    F2Matrix upper;
};

inline F2Matrix permutation_matrix(const std::vector<std::size_t> &perm) {
    F2Matrix p(perm.size(), perm.size());
    for (std::size_t i = 0; i < perm.size(); i++) {
        p.set(i, perm[i], true);
    }
    return p;
}

inline PluFactors plu_decompose(const F2Matrix &m) {
    if (!m.square()) {
        throw DimensionMismatch("plu_decompose: matrix is not square");
    }
    std::size_t n = m.rows();
    F2Matrix work = m;
    F2Matrix lower(n, n);
    // origin[i] = row of m currently sitting at position i of `work`.
    std::vector<std::size_t> origin(n);
    for (std::size_t i = 0; i < n; i++) {
        origin[i] = i;
    }
    for (std::size_t c = 0; c < n; c++) {
        std::size_t pivot = c;
        while (pivot < n && !work.get(pivot, c)) {
            pivot++;
        }
        if (pivot == n) {
            throw SingularMatrix("plu_decompose: no pivot in column " + std::to_string(c));
        }
        if (pivot != c) {
            work.swap_rows(pivot, c);
            lower.swap_rows(pivot, c);
            std::swap(origin[pivot], origin[c]);
        }
        std::size_t first_word = c / F2Matrix::kWordBits;
        for (std::size_t i = c + 1; i < n; i++) {
            if (work.get(i, c)) {
                work.xor_row_from(i, c, first_word);
                lower.set(i, c, true);
            }
        }
    }
    for (std::size_t i = 0; i < n; i++) {
        lower.set(i, i, true);
    }
    // work row i == m row origin[i], so m row origin[i] == (L U) row i.
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; i++) {
        perm[origin[i]] = i;
    }
    return PluFactors{std::move(perm), std::move(lower), std::move(work)};
}

inline F2Matrix invert(const F2Matrix &m) {
    if (!m.square()) {
        throw DimensionMismatch("invert: matrix is not square");
    }
    std::size_t n = m.rows();
    F2Matrix work = m;
    F2Matrix inv = F2Matrix::identity(n);
    for (std::size_t c = 0; c < n; c++) {
        std::size_t pivot = c;
        while (pivot < n && !work.get(pivot, c)) {
            pivot++;
        }
        if (pivot == n) {
            throw SingularMatrix("invert: no pivot in column " + std::to_string(c));
        }
        work.swap_rows(pivot, c);
        inv.swap_rows(pivot, c);
        for (std::size_t i = 0; i < n; i++) {
            if (i != c && work.get(i, c)) {
                work.xor_row_from(i, c, c / F2Matrix::kWordBits);
                inv.xor_row(i, c);
            }
        }
    }
    return inv;
}

/// Uniform random member of GL(n,2) by rejection sampling; deterministic in `seed`.
inline F2Matrix random_gl(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    F2Matrix m(n, n);
    std::size_t tail = n % F2Matrix::kWordBits;
    F2Matrix::Word tail_mask = tail == 0 ? ~F2Matrix::Word{0} : ((F2Matrix::Word{1} << tail) - 1);
    while (true) {
        for (std::size_t i = 0; i < n; i++) {
            auto r = m.row(i);
            for (std::size_t w = 0; w < r.size(); w++) {
                r[w] = rng();
            }
            r[r.size() - 1] &= tail_mask;
        }
        if (rank(m) == n) {
            return m;
        }
    }
}

/// Uniform random unit lower triangular matrix.
inline F2Matrix random_unit_lower(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j < i; j++) {
            m.set(i, j, rng() & 1);
        }
        m.set(i, i, true);
    }
    return m;
}

inline F2Matrix random_unit_upper(std::size_t n, std::uint64_t seed) {
    return random_unit_lower(n, seed).transposed();
}

/// Matrix text format: a `<rows> <cols>` header, then one line of '0'/'1' characters per row.
/// Lines starting with '#' are comments anywhere in the stream.
inline F2Matrix read_matrix(std::istream &in) {
    std::string line;
    auto next_line = [&](std::string &out) {
        while (std::getline(in, out)) {
            if (!out.empty() && out.back() == '\r') {
                out.pop_back();
            }
            if (!out.empty() && out[0] == '#') {
                continue;
            }
            if (out.find_first_not_of(" \t") == std::string::npos) {
                continue;
            }
            return true;
        }
        return false;
    };
    if (!next_line(line)) {
        throw ParseError("matrix: missing header");
    }
    std::istringstream header(line);
    long long rows = -1, cols = -1;
    std::string extra;
    if (!(header >> rows >> cols) || (header >> extra) || rows < 1 || cols < 1) {
        throw ParseError("matrix: bad header '" + line + "'");
    }
    F2Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    for (std::size_t i = 0; i < m.rows(); i++) {
        if (!next_line(line)) {
            throw ParseError("matrix: expected " + std::to_string(rows) + " rows, got " + std::to_string(i));
        }
        if (line.size() != m.cols()) {
            throw ParseError("matrix: row " + std::to_string(i) + " has " + std::to_string(line.size()) +
                             " characters, expected " + std::to_string(cols));
        }
        for (std::size_t j = 0; j < m.cols(); j++) {
            if (line[j] == '1') {
                m.set(i, j, true);
            } else if (line[j] != '0') {
                throw ParseError("matrix: unexpected character in row " + std::to_string(i));
            }
        }
    }
    if (next_line(line)) {
        throw ParseError("matrix: trailing data after last row");
    }
    return m;
}

inline void write_matrix(std::ostream &out, const F2Matrix &m) {
    out << m.rows() << ' ' << m.cols() << '\n' << m.str();
}

}  // namespace parcnot
