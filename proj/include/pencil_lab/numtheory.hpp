#pragma once

#include <boost/multiprecision/miller_rabin.hpp>

#include <algorithm>
#include <map>
#include <vector>

#include "pencil_lab/poly.hpp"
#include "pencil_lab/rational.hpp"

namespace pencil_lab {

namespace detail {

inline Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

inline bool is_probable_prime(const Int& n) {
    if (n < 2) return false;
    return mp::miller_rabin_test(mp::cpp_int(n.str()), 32);
}

// Brent's cycle variant of Pollard's rho. n must be odd, composite, > 1.
inline Int pollard_rho(const Int& n, unsigned c0) {
    for (unsigned c = c0;; ++c) {
        Int x(2), y(2), d(1);
        Int saved_x = x;
        unsigned power = 1, lam = 0;
        while (d == 1) {
            if (lam == power) {
                saved_x = x;
                power *= 2;
                lam = 0;
            }
            x = (x * x + c) % n;
            ++lam;
            Int diff = abs_int(x - saved_x);
            if (diff == 0) break; // cycle without factor; retry with new c
            d = gcd(diff, n);
        }
        if (d != 1 && d != n) return d;
    }
}

inline void factor_rec(Int n, std::map<Int, unsigned>& out) {
    if (n <= 1) return;
    if (is_probable_prime(n)) {
        ++out[n];
        return;
    }
    Int d = pollard_rho(n, 1);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

} // namespace detail

// Prime factorization of |n| (n != 0). Small primes by trial division, the
// rest by Pollard rho with Miller-Rabin certificates.
inline std::map<Int, unsigned> factorize(Int n) {
    std::map<Int, unsigned> out;
    n = detail::abs_int(n);
    if (n <= 1) return out;
    for (Int p : {Int(2), Int(3), Int(5)})
        while (n % p == 0) {
            ++out[p];
            n /= p;
        }
    for (Int p(7); p * p <= n && p < 100000; p += 2)
        while (n % p == 0) {
            ++out[p];
            n /= p;
        }
    detail::factor_rec(n, out);
    return out;
}

inline std::vector<Int> sorted_divisors(const Int& n) {
    std::map<Int, unsigned> f = factorize(n);
    std::vector<Int> divs{Int(1)};
    for (const auto& [p, e] : f) {
        std::size_t base = divs.size();
        Int pk(1);
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

// All rational roots of f with multiplicities, exactly. Assumes f != 0.
inline std::vector<std::pair<Rat, unsigned>> rational_roots(Poly f) {
    std::vector<std::pair<Rat, unsigned>> roots;
    if (f.is_zero() || f.degree() == 0) return roots;

    // Strip roots at zero.
    unsigned zmult = 0;
    while (f.coeff(0) == 0 && f.degree() >= 1) {
        std::vector<Rat> c(f.coeffs().begin() + 1, f.coeffs().end());
        f = Poly(std::move(c));
        ++zmult;
    }
    if (zmult > 0) roots.emplace_back(Rat(0), zmult);
    if (f.degree() < 1) return roots;

    // Integer primitive version: clear denominators.
    Int den(1);
    for (const Rat& c : f.coeffs()) den = lcm(den, rat_den(c));
    std::vector<Int> ic;
    for (const Rat& c : f.coeffs()) ic.push_back(rat_num(c) * (den / rat_den(c)));
    Int content(0);
    for (const Int& c : ic) content = gcd(content, c);
    if (content > 1)
        for (Int& c : ic) c /= content;

    Int a0 = detail::abs_int(ic.front());
    Int an = detail::abs_int(ic.back());
    std::vector<Int> ps = sorted_divisors(a0);
    std::vector<Int> qs = sorted_divisors(an);

    for (const Int& q : qs) {
        for (const Int& p : ps) {
            if (gcd(p, q) != 1) continue;
            for (int sign : {1, -1}) {
                Rat cand(sign > 0 ? p : Int(-p), q);
                if (f.eval(cand) != 0) continue;
                unsigned mult = 0;
                Poly lin = Poly::linear(-cand, Rat(1)); // lambda - cand
                while (true) {
                    Poly rem;
                    Poly quo = f.divmod(lin, rem);
                    if (!rem.is_zero()) break;
                    f = quo;
                    ++mult;
                }
                roots.emplace_back(cand, mult);
            }
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return roots;
}

} // namespace pencil_lab
