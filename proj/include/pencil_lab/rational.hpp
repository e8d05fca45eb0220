#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "pencil_lab/errors.hpp"

namespace pencil_lab {

namespace mp = boost::multiprecision;

// Arbitrary-precision integers and rationals. Expression templates are
// disabled so the types behave like plain value types in generic code.
using Int = mp::number<mp::cpp_int_backend<>, mp::et_off>;
using Rat = mp::number<mp::backends::rational_adaptor<mp::cpp_int_backend<>>, mp::et_off>;

inline Int rat_num(const Rat& r) { return numerator(r); }
inline Int rat_den(const Rat& r) { return denominator(r); }

// Rat with sign normalization (the backend insists on positive denominators).
inline Rat make_rat(Int num, Int den) {
    if (den == 0) throw invalid_input("MalformedRational", "zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rat(num, den);
}

inline bool is_integer(const Rat& r) { return rat_den(r) == 1; }

// "p/q" or "p"; q > 0 after normalization.
inline std::string rat_to_string(const Rat& r) {
    if (is_integer(r)) return rat_num(r).str();
    return rat_num(r).str() + "/" + rat_den(r).str();
}

inline Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw invalid_input("MalformedRational", "empty string");
    std::size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        return make_rat(num, den);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw invalid_input("MalformedRational", "cannot parse '" + s + "'");
    }
}

} // namespace pencil_lab
