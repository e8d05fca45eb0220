#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "pencil_lab/pencil.hpp"
#include "pencil_lab/subspace.hpp"

namespace plt {

using namespace pencil_lab;

inline MatQ mat(std::vector<std::vector<long>> rows) {
    std::vector<std::vector<Rat>> conv;
    for (auto& r : rows) {
        std::vector<Rat> row;
        for (long v : r) row.emplace_back(v);
        conv.push_back(row);
    }
    return MatQ::from_rows(conv);
}

inline std::vector<Rat> vec(std::vector<long> v) {
    std::vector<Rat> r;
    for (long x : v) r.emplace_back(x);
    return r;
}

inline Subspace span(std::size_t ambient, std::vector<std::vector<long>> rows) {
    std::vector<std::vector<Rat>> conv;
    for (auto& r : rows) conv.push_back(vec(r));
    return Subspace::span_of(ambient, conv);
}

// Unit coordinate vector.
inline std::vector<Rat> unit(std::size_t n, std::size_t i) {
    std::vector<Rat> v(n, Rat(0));
    v[i] = Rat(1);
    return v;
}

inline Subspace span_units(std::size_t n, std::vector<std::size_t> idxs) {
    std::vector<std::vector<Rat>> rows;
    for (std::size_t i : idxs) rows.push_back(unit(n, i));
    return Subspace::span_of(n, rows);
}

inline MatQ random_matrix(Rng& rng, std::size_t r, std::size_t c, long lo = -4, long hi = 4) {
    MatQ m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.at(i, j) = Rat(rng.range(lo, hi));
    return m;
}

inline JKInvariants inv_of(const std::string& text) { return JKInvariants::parse(text); }

} // namespace plt
