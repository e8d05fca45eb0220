#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pencil_lab/matrix.hpp"
#include "pencil_lab/rational.hpp"

namespace pencil_lab {

// Dense univariate polynomial in lambda with rational coefficients.
class Poly {
public:
    Poly() = default;
    explicit Poly(Rat c) { if (c != 0) coeffs_.push_back(c); }
    explicit Poly(std::vector<Rat> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Poly lambda() { return Poly(std::vector<Rat>{Rat(0), Rat(1)}); }
    // a + b*lambda
    static Poly linear(Rat a, Rat b) { return Poly(std::vector<Rat>{a, b}); }

    bool is_zero() const { return coeffs_.empty(); }
    // degree of the zero polynomial is -1 by convention
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Rat>& coeffs() const { return coeffs_; }
    Rat coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Rat(0); }
    Rat leading() const { return coeffs_.empty() ? Rat(0) : coeffs_.back(); }

    Rat eval(const Rat& x) const {
        Rat v(0);
        for (std::size_t i = coeffs_.size(); i-- > 0;) v = v * x + coeffs_[i];
        return v;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<Rat> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rat(0));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<Rat> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rat(0));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
        return Poly(std::move(c));
    }
    Poly operator-() const {
        std::vector<Rat> c = coeffs_;
        for (Rat& x : c) x = -x;
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<Rat> c(a.coeffs_.size() + b.coeffs_.size() - 1, Rat(0));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (a.coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return Poly(std::move(c));
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.coeffs_ == b.coeffs_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    // Long division; returns quotient, stores remainder.
    Poly divmod(const Poly& d, Poly& rem) const {
        if (d.is_zero()) throw invalid_input("DivisionByZero", "polynomial division by zero");
        Poly q;
        rem = *this;
        std::vector<Rat> qc(std::max<int>(0, degree() - d.degree() + 1), Rat(0));
        while (!rem.is_zero() && rem.degree() >= d.degree()) {
            std::size_t shift = static_cast<std::size_t>(rem.degree() - d.degree());
            Rat f = rem.leading() / d.leading();
            qc[shift] = f;
            std::vector<Rat> sub(shift + d.coeffs_.size(), Rat(0));
            for (std::size_t i = 0; i < d.coeffs_.size(); ++i) sub[shift + i] = f * d.coeffs_[i];
            rem = rem - Poly(std::move(sub));
        }
        return Poly(std::move(qc));
    }

    // Exact division; the remainder must vanish.
    Poly divexact(const Poly& d) const {
        Poly rem;
        Poly q = divmod(d, rem);
        if (!rem.is_zero()) throw invalid_input("InexactDivision", "polynomial division not exact");
        return q;
    }

    Poly derivative() const {
        if (coeffs_.size() <= 1) return Poly();
        std::vector<Rat> c(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i) c[i - 1] = coeffs_[i] * Rat(static_cast<long>(i));
        return Poly(std::move(c));
    }

    Poly monic() const {
        if (is_zero()) return *this;
        Rat inv = Rat(1) / leading();
        std::vector<Rat> c = coeffs_;
        for (Rat& x : c) x *= inv;
        return Poly(std::move(c));
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::string s;
        for (std::size_t i = coeffs_.size(); i-- > 0;) {
            if (coeffs_[i] == 0) continue;
            if (!s.empty()) s += " + ";
            s += rat_to_string(coeffs_[i]);
            if (i >= 1) s += "*l";
            if (i >= 2) s += "^" + std::to_string(i);
        }
        return s;
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }
    std::vector<Rat> coeffs_;
};

inline Poly poly_gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly rem;
        a.divmod(b, rem);
        a = b;
        b = rem;
    }
    return a.monic();
}

inline Poly poly_lcm(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    return (a * b).divexact(poly_gcd(a, b)).monic();
}

// Matrix with polynomial entries. Degrees are <= 1 when built from a pencil;
// elimination may raise them.
class PolyMat {
public:
    PolyMat() = default;
    PolyMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static PolyMat from_pencil(const MatQ& a, const MatQ& b) {
        if (a.rows() != b.rows() || a.cols() != b.cols())
            throw invalid_input("SizeMismatch", "pencil generators differ in shape");
        PolyMat p(a.rows(), a.cols());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                p.at(i, j) = Poly::linear(a.at(i, j), b.at(i, j));
        return p;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Poly& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Poly& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    MatQ eval(const Rat& x) const {
        MatQ m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m.at(i, j) = at(i, j).eval(x);
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Poly> data_;
};

// Rank over the rational function field, by fraction-free (Bareiss) row
// elimination on the polynomial entries. Equals max over lambda of the rank
// of the evaluated matrix.
inline std::size_t rank_over_lambda(const PolyMat& pm) {
    PolyMat a = pm;
    std::size_t r = 0;
    Poly prev_pivot(Rat(1));
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        // Pick the lowest-degree nonzero pivot in this column to slow growth.
        std::size_t piv = a.rows();
        for (std::size_t i = r; i < a.rows(); ++i) {
            if (a.at(i, c).is_zero()) continue;
            if (piv == a.rows() || a.at(i, c).degree() < a.at(piv, c).degree()) piv = i;
        }
        if (piv == a.rows()) continue;
        if (piv != r)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a.at(piv, j), a.at(r, j));
        for (std::size_t i = r + 1; i < a.rows(); ++i) {
            if (a.at(i, c).is_zero() && a.at(r, c).is_zero()) continue;
            for (std::size_t j = c + 1; j < a.cols(); ++j)
                a.at(i, j) = (a.at(i, j) * a.at(r, c) - a.at(i, c) * a.at(r, j)).divexact(prev_pivot);
            a.at(i, c) = Poly();
        }
        prev_pivot = a.at(r, c);
        ++r;
    }
    return r;
}

} // namespace pencil_lab
