#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "bcn/errors.hpp"

// Exact arithmetic for logical matrices in delta form, plus a small dense
// rational matrix for the few places where a product is not logical.
// No floating point anywhere: every test in this library is an exact
// predicate, so everything is integer arithmetic.

namespace bcn {

/// A 0/1 matrix with exactly one 1 per column, stored as one 1-based row
/// index per column ("delta form"): delta_m[i_1,...,i_r] is the m-row
/// matrix whose column k is the i_k-th canonical basis vector.
class LogicalMatrix {
public:
    LogicalMatrix(int rows, std::vector<int> delta) : rows_(rows), delta_(std::move(delta)) {
        if (rows_ < 1)
            throw ValidationError("logical matrix needs at least one row");
        if (delta_.empty())
            throw ValidationError("logical matrix needs at least one column");
        for (std::size_t c = 0; c < delta_.size(); ++c) {
            if (delta_[c] < 1 || delta_[c] > rows_)
                throw ValidationError("delta entry " + std::to_string(delta_[c]) +
                                      " out of range 1.." + std::to_string(rows_) +
                                      " in column " + std::to_string(c + 1));
        }
    }

    static LogicalMatrix identity(int n) {
        std::vector<int> d(static_cast<std::size_t>(n));
        std::iota(d.begin(), d.end(), 1);
        return LogicalMatrix(n, std::move(d));
    }

    /// The single column delta_rows^index.
    static LogicalMatrix basis_column(int rows, int index) {
        return LogicalMatrix(rows, std::vector<int>{index});
    }

    int rows() const { return rows_; }
    int cols() const { return static_cast<int>(delta_.size()); }

    /// 1-based row index of the 1 in column j (j is 1-based).
    int col(int j) const {
        if (j < 1 || j > cols())
            throw ValidationError("column index " + std::to_string(j) + " out of range");
        return delta_[static_cast<std::size_t>(j - 1)];
    }

    const std::vector<int>& delta() const { return delta_; }

    bool is_square() const { return rows_ == cols(); }

    /// True iff every row index appears exactly once (square + bijective).
    bool is_permutation() const {
        if (!is_square()) return false;
        std::vector<char> seen(static_cast<std::size_t>(rows_), 0);
        for (int d : delta_) {
            if (seen[static_cast<std::size_t>(d - 1)]) return false;
            seen[static_cast<std::size_t>(d - 1)] = 1;
        }
        return true;
    }

    friend bool operator==(const LogicalMatrix&, const LogicalMatrix&) = default;

private:
    int rows_;
    std::vector<int> delta_;
};

/// Transpose of a permutation matrix (= its inverse), again in delta form.
inline LogicalMatrix transpose_permutation(const LogicalMatrix& t) {
    if (!t.is_permutation())
        throw ValidationError("transpose_permutation: matrix is not a permutation");
    std::vector<int> inv(static_cast<std::size_t>(t.cols()));
    for (int q = 1; q <= t.cols(); ++q)
        inv[static_cast<std::size_t>(t.col(q) - 1)] = q;
    return LogicalMatrix(t.rows(), std::move(inv));
}

/// Left semi-tensor product of two logical matrices, done entirely with
/// index arithmetic.  With alpha = lcm(cols(A), rows(B)) this is
/// (A (x) I_{alpha/cols A}) (B (x) I_{alpha/rows B}); it reduces to the
/// ordinary product when cols(A) = rows(B).
inline LogicalMatrix stp(const LogicalMatrix& a, const LogicalMatrix& b) {
    const std::int64_t ca = a.cols(), rb = b.rows();
    const std::int64_t alpha = std::lcm(ca, rb);
    const std::int64_t k1 = alpha / ca;  // pad factor on A
    const std::int64_t k2 = alpha / rb;  // pad factor on B
    const std::int64_t out_rows = static_cast<std::int64_t>(a.rows()) * k1;
    const std::int64_t out_cols = static_cast<std::int64_t>(b.cols()) * k2;

    std::vector<int> delta(static_cast<std::size_t>(out_cols));
    for (std::int64_t j = 1; j <= out_cols; ++j) {
        const std::int64_t c2 = (j - 1) / k2 + 1;          // column of B
        const std::int64_t t2 = j - (c2 - 1) * k2;         // slot inside the B pad
        const std::int64_t mid = (b.col(static_cast<int>(c2)) - 1) * k2 + t2;
        const std::int64_t c1 = (mid - 1) / k1 + 1;        // column of A
        const std::int64_t t1 = mid - (c1 - 1) * k1;
        delta[static_cast<std::size_t>(j - 1)] =
            static_cast<int>((a.col(static_cast<int>(c1)) - 1) * k1 + t1);
    }
    return LogicalMatrix(static_cast<int>(out_rows), std::move(delta));
}

/// Kronecker product of logical matrices (always logical again).
inline LogicalMatrix kron(const LogicalMatrix& a, const LogicalMatrix& b) {
    std::vector<int> delta;
    delta.reserve(static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols()));
    for (int i = 1; i <= a.cols(); ++i)
        for (int j = 1; j <= b.cols(); ++j)
            delta.push_back((a.col(i) - 1) * b.rows() + b.col(j));
    return LogicalMatrix(a.rows() * b.rows(), std::move(delta));
}

/// The mn x mn permutation W_[m,n] = [I_n (x) d_m^1, ..., I_n (x) d_m^m]
/// that exchanges the order of Kronecker factors.
inline LogicalMatrix swap_matrix(int m, int n) {
    if (m < 1 || n < 1)
        throw ValidationError("swap_matrix: factors must be positive");
    std::vector<int> delta(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= n; ++j)
            delta[static_cast<std::size_t>((i - 1) * n + j - 1)] = (j - 1) * m + i;
    return LogicalMatrix(m * n, std::move(delta));
}

/// Dense matrix of exact rationals with one shared positive denominator.
class RationalMatrix {
public:
    RationalMatrix(int rows, int cols, std::int64_t denominator = 1)
        : rows_(rows), cols_(cols), den_(denominator),
          num_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {
        if (rows_ < 1 || cols_ < 1)
            throw ValidationError("rational matrix needs positive dimensions");
        if (den_ < 1)
            throw ValidationError("rational matrix denominator must be >= 1");
    }

    static RationalMatrix from_rows(const std::vector<std::vector<std::int64_t>>& entries,
                                    std::int64_t denominator = 1) {
        if (entries.empty() || entries.front().empty())
            throw ValidationError("rational matrix needs positive dimensions");
        RationalMatrix m(static_cast<int>(entries.size()),
                         static_cast<int>(entries.front().size()), denominator);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].size() != entries.front().size())
                throw ValidationError("ragged rows in rational matrix");
            for (std::size_t j = 0; j < entries[i].size(); ++j)
                m.at(static_cast<int>(i) + 1, static_cast<int>(j) + 1) = entries[i][j];
        }
        return m;
    }

    static RationalMatrix identity(int n) {
        RationalMatrix m(n, n);
        for (int i = 1; i <= n; ++i) m.at(i, i) = 1;
        return m;
    }

    static RationalMatrix ones_row(int n) {
        RationalMatrix m(1, n);
        for (int j = 1; j <= n; ++j) m.at(1, j) = 1;
        return m;
    }

    static RationalMatrix ones_column(int n) {
        RationalMatrix m(n, 1);
        for (int i = 1; i <= n; ++i) m.at(i, 1) = 1;
        return m;
    }

    /// Dense 0/1 expansion of a delta-form matrix.
    static RationalMatrix dense(const LogicalMatrix& l) {
        RationalMatrix m(l.rows(), l.cols());
        for (int j = 1; j <= l.cols(); ++j) m.at(l.col(j), j) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::int64_t denominator() const { return den_; }

    std::int64_t& at(int i, int j) { return num_[index(i, j)]; }
    std::int64_t at(int i, int j) const { return num_[index(i, j)]; }

    RationalMatrix transpose() const {
        RationalMatrix m(cols_, rows_, den_);
        for (int i = 1; i <= rows_; ++i)
            for (int j = 1; j <= cols_; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    /// Divide numerators and denominator by their common gcd.
    RationalMatrix normalized() const {
        std::int64_t g = den_;
        for (std::int64_t v : num_) g = std::gcd(g, v < 0 ? -v : v);
        if (g <= 1) return *this;
        RationalMatrix m(rows_, cols_, den_ / g);
        for (std::size_t k = 0; k < num_.size(); ++k) m.num_[k] = num_[k] / g;
        return m;
    }

    /// Exact value equality (independent of the denominator chosen).
    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
        for (std::size_t k = 0; k < a.num_.size(); ++k)
            if (a.num_[k] * b.den_ != b.num_[k] * a.den_) return false;
        return true;
    }

private:
    std::size_t index(int i, int j) const {
        if (i < 1 || i > rows_ || j < 1 || j > cols_)
            throw ValidationError("rational matrix index out of range");
        return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(j - 1);
    }

    int rows_, cols_;
    std::int64_t den_;
    std::vector<std::int64_t> num_;
};

inline RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols() != b.rows())
        throw ValidationError("multiply: inner dimensions differ");
    RationalMatrix m(a.rows(), b.cols(), a.denominator() * b.denominator());
    for (int i = 1; i <= a.rows(); ++i)
        for (int k = 1; k <= a.cols(); ++k) {
            const std::int64_t aik = a.at(i, k);
            if (aik == 0) continue;
            for (int j = 1; j <= b.cols(); ++j) m.at(i, j) += aik * b.at(k, j);
        }
    return m.normalized();
}

inline RationalMatrix kron(const RationalMatrix& a, const RationalMatrix& b) {
    RationalMatrix m(a.rows() * b.rows(), a.cols() * b.cols(),
                     a.denominator() * b.denominator());
    for (int i = 1; i <= a.rows(); ++i)
        for (int j = 1; j <= a.cols(); ++j) {
            const std::int64_t aij = a.at(i, j);
            if (aij == 0) continue;
            for (int k = 1; k <= b.rows(); ++k)
                for (int l = 1; l <= b.cols(); ++l)
                    m.at((i - 1) * b.rows() + k, (j - 1) * b.cols() + l) = aij * b.at(k, l);
        }
    return m.normalized();
}

/// Semi-tensor product on dense rationals: the fallback route when an
/// operand is not logical.
inline RationalMatrix stp(const RationalMatrix& a, const RationalMatrix& b) {
    const std::int64_t alpha = std::lcm<std::int64_t>(a.cols(), b.rows());
    const RationalMatrix left = kron(a, RationalMatrix::identity(static_cast<int>(alpha / a.cols())));
    const RationalMatrix right = kron(b, RationalMatrix::identity(static_cast<int>(alpha / b.rows())));
    return multiply(left, right);
}

/// True iff the denominator divides every numerator and the quotient has
/// exactly one 1 per column and 0 elsewhere.
inline bool is_logical(const RationalMatrix& m) {
    for (int j = 1; j <= m.cols(); ++j) {
        int ones = 0;
        for (int i = 1; i <= m.rows(); ++i) {
            const std::int64_t v = m.at(i, j);
            if (v % m.denominator() != 0) return false;
            const std::int64_t q = v / m.denominator();
            if (q == 1)
                ++ones;
            else if (q != 0)
                return false;
        }
        if (ones != 1) return false;
    }
    return true;
}

/// Delta form of a rational matrix that passes is_logical.
inline LogicalMatrix to_logical(const RationalMatrix& m) {
    if (!is_logical(m))
        throw ValidationError("to_logical: matrix is not logical");
    std::vector<int> delta(static_cast<std::size_t>(m.cols()));
    for (int j = 1; j <= m.cols(); ++j)
        for (int i = 1; i <= m.rows(); ++i)
            if (m.at(i, j) != 0) delta[static_cast<std::size_t>(j - 1)] = i;
    return LogicalMatrix(m.rows(), std::move(delta));
}

/// Delta index of a packed tuple of Boolean variables: true maps to d_2^1,
/// false to d_2^2, the first variable is the outermost factor, so
/// k = 1 + sum_i (1 - b_i) * 2^(n-i).
inline int state_to_index(const std::vector<bool>& bits) {
    if (bits.empty() || bits.size() > 30)
        throw ValidationError("state_to_index: need between 1 and 30 variables");
    int k = 0;
    for (bool b : bits) k = k * 2 + (b ? 0 : 1);
    return k + 1;
}

/// Inverse of state_to_index for an n-variable tuple.
inline std::vector<bool> index_to_state(int k, int n) {
    if (n < 1 || n > 30)
        throw ValidationError("index_to_state: need between 1 and 30 variables");
    if (k < 1 || k > (1 << n))
        throw ValidationError("index_to_state: index " + std::to_string(k) +
                              " out of range 1..2^" + std::to_string(n));
    std::vector<bool> bits(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        bits[static_cast<std::size_t>(i - 1)] = (((k - 1) >> (n - i)) & 1) == 0;
    return bits;
}

/// Bit i (1-based, outermost first) of the n-variable tuple packed at k.
inline bool state_bit(int k, int n, int i) {
    return (((k - 1) >> (n - i)) & 1) == 0;
}

}  // namespace bcn
