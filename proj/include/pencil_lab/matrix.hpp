#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pencil_lab/errors.hpp"
#include "pencil_lab/gf.hpp"

namespace pencil_lab {

// Dense matrix over a field F (Rat or GFp). Conventions used throughout:
//   - vectors are coordinate rows (std::vector<F>),
//   - a bilinear form B evaluates as B(u, v) = u * B * v^T,
//   - an operator P acts on column vectors, so the image of a row vector r
//     is r * P^T,
//   - subspaces are row spans.
template <class F>
class Matrix {
public:
    using Traits = field_traits<F>;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Traits::zero()) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Traits::one();
        return m;
    }

    static Matrix from_rows(std::vector<std::vector<F>> rows) {
        std::size_t r = rows.size();
        std::size_t c = r == 0 ? 0 : rows[0].size();
        Matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) throw invalid_input("SizeMismatch", "ragged row list");
            for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    F& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const F& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<F> row(std::size_t i) const {
        return std::vector<F>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
    }
    void set_row(std::size_t i, const std::vector<F>& v) {
        for (std::size_t j = 0; j < cols_; ++j) at(i, j) = v[j];
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    bool is_zero() const {
        for (const F& x : data_)
            if (!Traits::is_zero(x)) return false;
        return true;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o);
        Matrix r = *this;
        for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] += o.data_[k];
        return r;
    }
    Matrix operator-(const Matrix& o) const {
        require_same_shape(o);
        Matrix r = *this;
        for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] -= o.data_[k];
        return r;
    }
    Matrix operator-() const {
        Matrix r = *this;
        for (F& x : r.data_) x = -x;
        return r;
    }
    Matrix operator*(const F& c) const {
        Matrix r = *this;
        for (F& x : r.data_) x *= c;
        return r;
    }
    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw invalid_input("SizeMismatch", "matrix product shape");
        Matrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const F& a = at(i, k);
                if (Traits::is_zero(a)) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) += a * o.at(k, j);
            }
        return r;
    }

    // Operator applied to a coordinate column (v as row storage).
    std::vector<F> apply(const std::vector<F>& v) const {
        if (v.size() != cols_) throw invalid_input("SizeMismatch", "operator/vector shape");
        std::vector<F> r(rows_, Traits::zero());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (!Traits::is_zero(at(i, j))) r[i] += at(i, j) * v[j];
        return r;
    }

    // u * M * v^T.
    F eval(const std::vector<F>& u, const std::vector<F>& v) const {
        std::vector<F> mv = apply(v);
        F s = Traits::zero();
        for (std::size_t i = 0; i < rows_; ++i)
            if (!Traits::is_zero(u[i])) s += u[i] * mv[i];
        return s;
    }

    bool is_skew_symmetric() const {
        if (rows_ != cols_) return false;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (!Traits::is_zero(at(i, i))) return false;
            for (std::size_t j = i + 1; j < cols_; ++j)
                if (at(i, j) != -at(j, i)) return false;
        }
        return true;
    }

    Matrix vstack(const Matrix& o) const {
        if (cols_ != o.cols_ && rows_ != 0 && o.rows_ != 0)
            throw invalid_input("SizeMismatch", "vstack column mismatch");
        std::size_t c = rows_ == 0 ? o.cols_ : cols_;
        Matrix r(rows_ + o.rows_, c);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < c; ++j) r.at(i, j) = at(i, j);
        for (std::size_t i = 0; i < o.rows_; ++i)
            for (std::size_t j = 0; j < c; ++j) r.at(rows_ + i, j) = o.at(i, j);
        return r;
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < rows_; ++i) {
            s += i == 0 ? "[" : " ";
            for (std::size_t j = 0; j < cols_; ++j) {
                s += Traits::str(at(i, j));
                if (j + 1 < cols_) s += " ";
            }
            s += i + 1 < rows_ ? "\n" : "]";
        }
        return s;
    }

private:
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw invalid_input("SizeMismatch", "matrix shape mismatch");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<F> data_;
};

template <class F>
struct RrefResult {
    Matrix<F> reduced;             // RREF of the input, zero rows at the bottom
    Matrix<F> transform;           // invertible; transform * input == reduced
    std::vector<std::size_t> pivots; // pivot column of each nonzero row
    std::size_t rank = 0;
};

template <class F>
RrefResult<F> rref(const Matrix<F>& m) {
    using T = field_traits<F>;
    RrefResult<F> res;
    res.reduced = m;
    res.transform = Matrix<F>::identity(m.rows());
    Matrix<F>& a = res.reduced;
    Matrix<F>& t = res.transform;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t piv = m.rows();
        for (std::size_t i = r; i < m.rows(); ++i)
            if (!T::is_zero(a.at(i, c))) { piv = i; break; }
        if (piv == m.rows()) continue;
        if (piv != r) {
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a.at(piv, j), a.at(r, j));
            for (std::size_t j = 0; j < t.cols(); ++j) std::swap(t.at(piv, j), t.at(r, j));
        }
        F inv = T::one() / a.at(r, c);
        for (std::size_t j = 0; j < a.cols(); ++j) a.at(r, j) *= inv;
        for (std::size_t j = 0; j < t.cols(); ++j) t.at(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || T::is_zero(a.at(i, c))) continue;
            F f = a.at(i, c);
            for (std::size_t j = 0; j < a.cols(); ++j) a.at(i, j) -= f * a.at(r, j);
            for (std::size_t j = 0; j < t.cols(); ++j) t.at(i, j) -= f * t.at(r, j);
        }
        res.pivots.push_back(c);
        ++r;
    }
    res.rank = r;
    return res;
}

template <class F>
std::size_t rank(const Matrix<F>& m) {
    return rref(m).rank;
}

// Basis of {x : m x = 0} as rows, in the canonical form induced by RREF
// (one basis vector per free column, unit at the free column).
template <class F>
Matrix<F> kernel_basis(const Matrix<F>& m) {
    using T = field_traits<F>;
    RrefResult<F> r = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : r.pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    Matrix<F> k(free_cols.size(), m.cols());
    for (std::size_t fi = 0; fi < free_cols.size(); ++fi) {
        std::size_t fc = free_cols[fi];
        k.at(fi, fc) = T::one();
        for (std::size_t pr = 0; pr < r.rank; ++pr)
            k.at(fi, r.pivots[pr]) = -r.reduced.at(pr, fc);
    }
    return k;
}

namespace detail {

// Integer row echelon form with per-row content stripping: scales rational
// rows to integers and eliminates with gcd-reduced cross-multiplications,
// which keeps entries at minor size instead of letting rationals blow up.
struct IntegerEchelon {
    std::vector<std::vector<Int>> rows;
    std::vector<std::size_t> pivots;
};

inline IntegerEchelon integer_echelon(const Matrix<Rat>& m) {
    std::size_t R = m.rows(), C = m.cols();
    IntegerEchelon e;
    e.rows.assign(R, std::vector<Int>(C));
    for (std::size_t i = 0; i < R; ++i) {
        Int scale(1);
        for (std::size_t j = 0; j < C; ++j) scale = lcm(scale, rat_den(m.at(i, j)));
        Int content(0);
        for (std::size_t j = 0; j < C; ++j) {
            e.rows[i][j] = rat_num(m.at(i, j)) * (scale / rat_den(m.at(i, j)));
            content = gcd(content, e.rows[i][j]);
        }
        if (content > 1)
            for (std::size_t j = 0; j < C; ++j) e.rows[i][j] /= content;
    }
    std::size_t r = 0;
    for (std::size_t c = 0; c < C && r < R; ++c) {
        std::size_t piv = R;
        for (std::size_t i = r; i < R; ++i) {
            if (e.rows[i][c] == 0) continue;
            if (piv == R || abs(e.rows[i][c]) < abs(e.rows[piv][c])) piv = i;
        }
        if (piv == R) continue;
        std::swap(e.rows[piv], e.rows[r]);
        for (std::size_t i = r + 1; i < R; ++i) {
            if (e.rows[i][c] == 0) continue;
            Int g = gcd(e.rows[r][c], e.rows[i][c]);
            Int fr = e.rows[r][c] / g, fi = e.rows[i][c] / g;
            Int content(0);
            for (std::size_t j = c; j < C; ++j) {
                e.rows[i][j] = e.rows[i][j] * fr - e.rows[r][j] * fi;
                content = gcd(content, e.rows[i][j]);
            }
            if (content > 1)
                for (std::size_t j = c; j < C; ++j) e.rows[i][j] /= content;
        }
        e.pivots.push_back(c);
        ++r;
    }
    return e;
}

} // namespace detail

inline std::size_t rank_fraction_free(const Matrix<Rat>& m) {
    return detail::integer_echelon(m).pivots.size();
}

// Kernel basis over the rationals via the integer echelon; equals
// kernel_basis entrywise (unit at each free column, pivot coordinates
// solved).
inline Matrix<Rat> kernel_basis_fraction_free(const Matrix<Rat>& m) {
    std::size_t C = m.cols();
    detail::IntegerEchelon e = detail::integer_echelon(m);
    std::size_t r = e.pivots.size();
    std::vector<bool> is_pivot(C, false);
    for (std::size_t c : e.pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < C; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    Matrix<Rat> k(free_cols.size(), C);
    for (std::size_t fi = 0; fi < free_cols.size(); ++fi) {
        std::vector<Rat> x(C, Rat(0));
        x[free_cols[fi]] = Rat(1);
        for (std::size_t i = r; i-- > 0;) {
            Rat acc(0);
            for (std::size_t j = e.pivots[i] + 1; j < C; ++j)
                if (e.rows[i][j] != 0 && x[j] != 0) acc += Rat(e.rows[i][j]) * x[j];
            x[e.pivots[i]] = -acc / Rat(e.rows[i][e.pivots[i]]);
        }
        k.set_row(fi, x);
    }
    return k;
}

template <class F>
Matrix<F> inverse(const Matrix<F>& m) {
    if (m.rows() != m.cols()) throw invalid_input("SizeMismatch", "inverse of non-square matrix");
    RrefResult<F> r = rref(m);
    if (r.rank != m.rows()) throw invalid_input("SingularMatrix", "matrix is not invertible");
    return r.transform;
}

template <class F>
bool is_invertible(const Matrix<F>& m) {
    return m.rows() == m.cols() && rank(m) == m.rows();
}

// One solution x of m * x = b (column convention), if any.
template <class F>
bool solve_linear(const Matrix<F>& m, const std::vector<F>& b, std::vector<F>& x) {
    using T = field_traits<F>;
    Matrix<F> aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols()) = b[i];
    }
    RrefResult<F> r = rref(aug);
    x.assign(m.cols(), T::zero());
    for (std::size_t i = 0; i < r.rank; ++i) {
        if (r.pivots[i] == m.cols()) return false; // inconsistent
        x[r.pivots[i]] = r.reduced.at(i, m.cols());
    }
    return true;
}

// M^k with k >= 0.
template <class F>
Matrix<F> mat_pow(const Matrix<F>& m, std::size_t k) {
    Matrix<F> r = Matrix<F>::identity(m.rows());
    for (std::size_t i = 0; i < k; ++i) r = r * m;
    return r;
}

template <class F = Rat>
std::vector<F> unit_vector(std::size_t n, std::size_t i) {
    std::vector<F> v(n, field_traits<F>::zero());
    v[i] = field_traits<F>::one();
    return v;
}

using MatQ = Matrix<Rat>;
using MatP = Matrix<GFp>;

} // namespace pencil_lab
