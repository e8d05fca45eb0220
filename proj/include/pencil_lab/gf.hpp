#pragma once

#include <cstdint>
#include <string>
#include <tuple>

#include "pencil_lab/errors.hpp"
#include "pencil_lab/rational.hpp"

namespace pencil_lab {

// Element of GF(p) for a small runtime prime. The prime travels with every
// element so generic linear algebra code can stay oblivious to it. Elements
// created without a prime (the 0/1 literals generic code needs) carry p = 0
// and adopt the prime of the other operand on first contact.
class GFp {
public:
    GFp() = default; // zero of unknown prime
    GFp(std::uint32_t prime, std::int64_t value) : p_(prime) {
        std::int64_t m = value % static_cast<std::int64_t>(prime);
        if (m < 0) m += prime;
        v_ = static_cast<std::uint32_t>(m);
    }

    static GFp zero_literal() { return GFp(); }
    static GFp one_literal() {
        GFp e;
        e.v_ = 1;
        return e;
    }

    std::uint32_t prime() const { return p_; }
    std::uint32_t value() const { return v_; }
    bool is_zero() const { return v_ == 0; }

    friend bool operator==(const GFp& a, const GFp& b) {
        auto [p, x, y] = align(a, b);
        (void)p;
        return x == y;
    }
    friend bool operator!=(const GFp& a, const GFp& b) { return !(a == b); }

    GFp operator-() const {
        if (p_ == 0) {
            if (v_ == 0) return *this;
            throw invalid_input("FieldMismatch", "negating a prime-less GF literal");
        }
        return GFp(p_, static_cast<std::int64_t>(p_) - v_);
    }

    friend GFp operator+(const GFp& a, const GFp& b) {
        auto [p, x, y] = align(a, b);
        return make(p, (x + y) % mod(p));
    }
    friend GFp operator-(const GFp& a, const GFp& b) {
        auto [p, x, y] = align(a, b);
        return make(p, (x + mod(p) - y) % mod(p));
    }
    friend GFp operator*(const GFp& a, const GFp& b) {
        auto [p, x, y] = align(a, b);
        return make(p, (x * y) % mod(p));
    }
    friend GFp operator/(const GFp& a, const GFp& b) { return a * b.inverse(); }

    GFp& operator+=(const GFp& b) { return *this = *this + b; }
    GFp& operator-=(const GFp& b) { return *this = *this - b; }
    GFp& operator*=(const GFp& b) { return *this = *this * b; }
    GFp& operator/=(const GFp& b) { return *this = *this / b; }

    GFp inverse() const {
        if (v_ == 0) throw invalid_input("DivisionByZero", "inverse of 0 in GF(p)");
        if (p_ == 0) return *this; // literal one
        std::int64_t t = 0, nt = 1, r = p_, nr = v_;
        while (nr != 0) {
            std::int64_t q = r / nr;
            std::int64_t tmp = t - q * nt; t = nt; nt = tmp;
            tmp = r - q * nr; r = nr; nr = tmp;
        }
        return GFp(p_, t);
    }

    std::string str() const { return std::to_string(v_); }

private:
    static std::uint64_t mod(std::uint32_t p) { return p == 0 ? 2 : p; } // literals are 0/1
    static GFp make(std::uint32_t p, std::uint64_t v) {
        GFp e;
        e.p_ = p;
        e.v_ = static_cast<std::uint32_t>(v);
        return e;
    }
    static std::tuple<std::uint32_t, std::uint64_t, std::uint64_t> align(const GFp& a, const GFp& b) {
        if (a.p_ != 0 && b.p_ != 0 && a.p_ != b.p_)
            throw invalid_input("FieldMismatch", "mixing GF(p) elements of different primes");
        std::uint32_t p = a.p_ != 0 ? a.p_ : b.p_;
        return {p, a.v_, b.v_}; // 0/1 literals are already reduced mod any prime
    }

    std::uint32_t p_ = 0;
    std::uint32_t v_ = 0;
};

// Field trait hooks used by the generic matrix code.
template <class F> struct field_traits;

template <> struct field_traits<Rat> {
    static Rat zero() { return Rat(0); }
    static Rat one() { return Rat(1); }
    static bool is_zero(const Rat& x) { return x == 0; }
    static std::string str(const Rat& x) { return rat_to_string(x); }
};

template <> struct field_traits<GFp> {
    static GFp zero() { return GFp::zero_literal(); }
    static GFp one() { return GFp::one_literal(); }
    static bool is_zero(const GFp& x) { return x.is_zero(); }
    static std::string str(const GFp& x) { return x.str(); }
};

} // namespace pencil_lab
