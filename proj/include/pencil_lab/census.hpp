#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pencil_lab/orbits.hpp"

namespace pencil_lab {

// ---------------------------------------------------------------------------
// Invariant subspace lattice (exact, from the invariants alone)

struct InvariantSubspaceDesc {
    std::vector<std::size_t> heights; // against descending half-sizes, one per block
};

// All Aut-invariant subspaces of a single-eigenvalue Jordan space, as height
// tuples; the count is prod(n_i - n_{i+1} + 1).
inline std::vector<InvariantSubspaceDesc> invariant_subspaces(const JKInvariants& inv) {
    if (!inv.single_eigenvalue())
        throw invalid_input("NotSingleEigenvalueJordan",
                            "invariant subspace lattice needs one Jordan eigenvalue");
    std::vector<std::size_t> hs = inv.halfsizes(inv.jordan.front().eigenvalue);
    std::vector<InvariantSubspaceDesc> out;
    for (auto& tuple : invariant_height_tuples(hs)) out.push_back({tuple});
    return out;
}

// Materialization in the synthesized standard layout: block i contributes
// e_{n-h+1}..e_n and f_1..f_h.
inline Subspace invariant_subspace_in_layout(const Pencil& p, const std::vector<BlockRef>& layout,
                                             const std::vector<std::size_t>& heights) {
    std::vector<std::vector<Rat>> rows;
    for (std::size_t b = 0; b < layout.size(); ++b) {
        const BlockRef& blk = layout[b];
        std::size_t n = blk.param, h = heights[b];
        for (std::size_t i = n - h; i < n; ++i) rows.push_back(unit_vector(p.dim, blk.e_cols[i]));
        for (std::size_t i = 0; i < h; ++i) rows.push_back(unit_vector(p.dim, blk.f_cols[i]));
    }
    return Subspace::span_of(p.dim, rows);
}

// The unique invariant bi-Lagrangian subspace (in the synthesized layout)
// when every Jordan block size is divisible by 4; absent otherwise.
inline std::optional<Subspace> invariant_bilagrangian(const JKInvariants& inv) {
    for (const auto& j : inv.jordan)
        if (j.halfsize % 2 != 0) return std::nullopt;
    auto [p, layout] = synthesize_with_layout(inv);
    std::vector<std::vector<Rat>> rows;
    for (const BlockRef& blk : layout) {
        if (blk.type == BlockRef::Type::Kronecker) {
            for (std::size_t col : blk.f_cols) rows.push_back(unit_vector(p.dim, col));
        } else {
            std::size_t m = blk.param / 2;
            for (std::size_t i = m; i < 2 * m; ++i) rows.push_back(unit_vector(p.dim, blk.e_cols[i]));
            for (std::size_t i = 0; i < m; ++i) rows.push_back(unit_vector(p.dim, blk.f_cols[i]));
        }
    }
    return Subspace::span_of(p.dim, rows);
}

// ---------------------------------------------------------------------------
// Finite-field brute force

namespace detail {

inline bool is_small_prime(std::uint32_t p) {
    if (p < 2) return false;
    for (std::uint32_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline GFp to_gfp(const Rat& x, std::uint32_t p) {
    Int den = rat_den(x) % Int(p);
    if (den == 0)
        throw invalid_input("BadReduction", "denominator vanishes modulo the census prime");
    long num = static_cast<long>(rat_num(x) % Int(p));
    long d = static_cast<long>(den);
    GFp dn(p, d);
    return GFp(p, num) * dn.inverse();
}

inline MatP to_gfp(const MatQ& m, std::uint32_t p) {
    MatP out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out.at(i, j) = to_gfp(m.at(i, j), p);
    return out;
}

// Enumerates the B-isotropic subspaces of dimension k in GF(p)^n, one RREF
// profile at a time; each subspace is produced exactly once. The isotropy
// conditions against already-fixed rows are linear, so each row is an affine
// solution-set enumeration rather than a raw scan.
class IsotropicEnumerator {
public:
    IsotropicEnumerator(const MatP& gram, std::size_t k, std::uint32_t p)
        : gram_(gram), n_(gram.rows()), k_(k), p_(p) {}

    // Emits every isotropic subspace whose RREF pivot set equals `pivots`.
    template <class Fn>
    void enumerate_profile(const std::vector<std::size_t>& pivots, Fn&& emit) {
        rows_.assign(k_, std::vector<GFp>(n_, GFp(p_, 0)));
        pivots_ = pivots;
        fill_row(0, emit);
    }

    template <class Fn>
    void enumerate(Fn&& emit) {
        std::vector<std::size_t> comb(k_);
        for (std::size_t i = 0; i < k_; ++i) comb[i] = i;
        while (true) {
            enumerate_profile(comb, emit);
            // next combination
            std::size_t i = k_;
            while (i-- > 0) {
                if (comb[i] + (k_ - i) < n_) {
                    ++comb[i];
                    for (std::size_t j = i + 1; j < k_; ++j) comb[j] = comb[j - 1] + 1;
                    break;
                }
                if (i == 0) return;
            }
        }
    }

    static std::vector<std::vector<std::size_t>> profiles(std::size_t n, std::size_t k) {
        std::vector<std::vector<std::size_t>> out;
        if (k > n) return out;
        std::vector<std::size_t> comb(k);
        for (std::size_t i = 0; i < k; ++i) comb[i] = i;
        while (true) {
            out.push_back(comb);
            std::size_t i = k;
            bool done = true;
            while (i-- > 0) {
                if (comb[i] + (k - i) < n) {
                    ++comb[i];
                    for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                    done = false;
                    break;
                }
            }
            if (done) return out;
        }
    }

private:
    template <class Fn>
    void fill_row(std::size_t r, Fn&& emit) {
        if (r == k_) {
            emit(rows_);
            return;
        }
        // Free coordinates of row r: non-pivot columns right of the pivot.
        std::vector<std::size_t> free_cols;
        for (std::size_t c = pivots_[r] + 1; c < n_; ++c)
            if (std::find(pivots_.begin(), pivots_.end(), c) == pivots_.end())
                free_cols.push_back(c);
        // Base row: unit at the pivot.
        std::vector<GFp> base(n_, GFp(p_, 0));
        base[pivots_[r]] = GFp(p_, 1);
        // Linear constraints: B(row_j, x) = 0 for j < r, i.e.
        // sum_c x_c * (row_j B)_c = 0 with x = base + free part.
        std::vector<std::vector<GFp>> cons; // per constraint: coefficients on free cols + rhs
        for (std::size_t j = 0; j < r; ++j) {
            std::vector<GFp> rb(n_, GFp(p_, 0));
            for (std::size_t a = 0; a < n_; ++a) {
                if (rows_[j][a].is_zero()) continue;
                for (std::size_t c = 0; c < n_; ++c) rb[c] += rows_[j][a] * gram_.at(a, c);
            }
            std::vector<GFp> row(free_cols.size() + 1, GFp(p_, 0));
            for (std::size_t fc = 0; fc < free_cols.size(); ++fc) row[fc] = rb[free_cols[fc]];
            row.back() = -rb[pivots_[r]]; // rhs
            cons.push_back(std::move(row));
        }
        // Solve the affine system over the free coordinates.
        std::size_t f = free_cols.size();
        MatP sys(cons.size(), f);
        std::vector<GFp> rhs;
        for (std::size_t i = 0; i < cons.size(); ++i) {
            for (std::size_t j = 0; j < f; ++j) sys.at(i, j) = cons[i][j];
            rhs.push_back(cons[i].back());
        }
        std::vector<GFp> part(f, GFp(p_, 0));
        if (!cons.empty() && !solve_linear(sys, rhs, part)) return; // no isotropic completion
        MatP null_rows(0, f);
        if (f > 0) null_rows = cons.empty() ? MatP::identity(f) : kernel_basis(sys);
        std::size_t nd = null_rows.rows();
        std::vector<std::size_t> counter(nd, 0);
        while (true) {
            std::vector<GFp> x = part;
            for (std::size_t b = 0; b < nd; ++b) {
                if (counter[b] == 0) continue;
                GFp c(p_, static_cast<long>(counter[b]));
                for (std::size_t j = 0; j < f; ++j) x[j] += c * null_rows.at(b, j);
            }
            rows_[r] = base;
            for (std::size_t j = 0; j < f; ++j) rows_[r][free_cols[j]] = x[j];
            fill_row(r + 1, emit);
            std::size_t i = 0;
            while (i < nd && counter[i] + 1 == p_) counter[i++] = 0;
            if (i == nd) break;
            ++counter[i];
        }
    }

    MatP gram_;
    std::size_t n_, k_;
    std::uint32_t p_;
    std::vector<std::vector<GFp>> rows_;
    std::vector<std::size_t> pivots_;
};

// GF(2) fast path: vectors of dimension <= 16 as bitmasks, rows filled
// profile by profile with the isotropy constraints solved as bit systems.
class Gf2IsotropicEnumerator {
public:
    Gf2IsotropicEnumerator(const MatP& gram, const MatP& op, std::size_t k)
        : n_(gram.rows()), k_(k) {
        for (std::size_t i = 0; i < n_; ++i) {
            std::uint32_t b = 0, p = 0;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!gram.at(i, j).is_zero()) b |= 1u << j;
                if (!op.at(i, j).is_zero()) p |= 1u << j;
            }
            brow_.push_back(b);
            prow_.push_back(p);
        }
    }

    // Emits each B-isotropic P-invariant k-subspace with this pivot profile
    // as row bitmasks (an RREF basis).
    template <class Fn>
    void enumerate_profile(const std::vector<std::size_t>& pivots, Fn&& emit) {
        pivots_ = pivots;
        rows_.assign(k_, 0);
        grams_.assign(k_, 0);
        fill_row(0, emit);
    }

private:
    static bool parity(std::uint32_t x) { return __builtin_popcount(x) & 1; }

    std::uint32_t apply_op(std::uint32_t x) const {
        std::uint32_t y = 0;
        for (std::size_t i = 0; i < n_; ++i)
            if (parity(prow_[i] & x)) y |= 1u << i;
        return y;
    }

    bool span_invariant() const {
        for (std::size_t r = 0; r < k_; ++r) {
            std::uint32_t y = apply_op(rows_[r]);
            for (std::size_t j = 0; j < k_; ++j)
                if (y & (1u << pivots_[j])) y ^= rows_[j];
            if (y != 0) return false;
        }
        return true;
    }

    template <class Fn>
    void fill_row(std::size_t r, Fn&& emit) {
        if (r == k_) {
            if (span_invariant()) emit(rows_);
            return;
        }
        std::uint32_t pivot_bit = 1u << pivots_[r];
        std::vector<std::size_t> fc;
        for (std::size_t c = pivots_[r] + 1; c < n_; ++c) {
            bool is_piv = false;
            for (std::size_t j = 0; j < k_; ++j) is_piv = is_piv || pivots_[j] == c;
            if (!is_piv) fc.push_back(c);
        }
        std::size_t f = fc.size();
        std::uint64_t coeff_mask = f ? ((1ull << f) - 1) : 0ull;
        // Constraints over the free bits: parity(x & gram_j) = 0, with the
        // rhs carried in bit f.
        std::vector<std::uint64_t> reduced;
        std::vector<std::size_t> lead;
        for (std::size_t j = 0; j < r; ++j) {
            std::uint64_t row = 0;
            for (std::size_t b = 0; b < f; ++b)
                if (grams_[j] & (1u << fc[b])) row |= 1ull << b;
            if (parity(pivot_bit & grams_[j])) row |= 1ull << f;
            // Reduce against the current RREF and insert.
            for (std::size_t i = 0; i < reduced.size(); ++i)
                if (row & (1ull << lead[i])) row ^= reduced[i];
            if ((row & coeff_mask) == 0) {
                if (row >> f) return; // inconsistent: no isotropic completion
                continue;
            }
            std::size_t l = 63 - static_cast<std::size_t>(__builtin_clzll(row & coeff_mask));
            for (std::size_t i = 0; i < reduced.size(); ++i)
                if (reduced[i] & (1ull << l)) reduced[i] ^= row;
            reduced.push_back(row);
            lead.push_back(l);
        }
        std::uint64_t particular = 0;
        for (std::size_t i = 0; i < reduced.size(); ++i)
            if (reduced[i] >> f) particular |= 1ull << lead[i];
        std::vector<std::uint64_t> basis;
        for (std::size_t b = 0; b < f; ++b) {
            bool is_lead = false;
            for (std::size_t l : lead) is_lead = is_lead || l == b;
            if (is_lead) continue;
            std::uint64_t v = 1ull << b;
            for (std::size_t i = 0; i < reduced.size(); ++i)
                if (reduced[i] & (1ull << b)) v |= 1ull << lead[i];
            basis.push_back(v);
        }
        std::size_t nd = basis.size();
        auto set_row = [&](std::uint64_t sol) {
            std::uint32_t x = pivot_bit;
            for (std::size_t b = 0; b < f; ++b)
                if ((sol >> b) & 1) x |= 1u << fc[b];
            rows_[r] = x;
            std::uint32_t g = 0;
            for (std::size_t c = 0; c < n_; ++c)
                if (parity(x & brow_[c])) g |= 1u << c;
            grams_[r] = g;
        };
        for (std::uint64_t counter = 0; counter < (1ull << nd); ++counter) {
            std::uint64_t sol = particular;
            for (std::size_t b = 0; b < nd; ++b)
                if ((counter >> b) & 1) sol ^= basis[b];
            set_row(sol);
            fill_row(r + 1, emit);
        }
    }

    std::size_t n_, k_;
    std::vector<std::uint32_t> brow_, prow_;
    std::vector<std::size_t> pivots_;
    std::vector<std::uint32_t> rows_;
    std::vector<std::uint32_t> grams_; // grams_[j] bit c = B(row_j, e_c)
};

} // namespace detail

// Census result: the subspaces are stored over GF(p) in the coordinates of
// the synthesized standard layout.
struct FFCensus {
    std::uint32_t prime = 0;
    JKInvariants invariants;
    std::vector<SubspaceP> subspaces; // full ambient subspaces (core included)
};

// Exhaustive list of bi-Lagrangian subspaces of the synthesized pencil
// reduced mod p: subspaces containing the core whose Jordan part is
// B-Lagrangian and P-invariant.
inline FFCensus ff_enumerate_bilagrangians(const JKInvariants& inv, std::uint32_t p,
                                           std::size_t workers = 1) {
    if (!detail::is_small_prime(p) || p > 13)
        throw unsupported("TooLarge", "census primes are 2..13");
    std::size_t dim = inv.dim();
    std::size_t cap = (p == 2) ? 12 : (p == 3) ? 8 : 6;
    if (dim > cap)
        throw unsupported("TooLarge", "census dimension cap is " + std::to_string(cap) +
                                          " over GF(" + std::to_string(p) + ")");

    JKInvariants cinv = inv;
    cinv.canonicalize();
    auto [pen, layout] = synthesize_with_layout(cinv);

    // Coordinates of the Jordan part and of the core in the standard layout.
    std::vector<std::size_t> jordan_cols, core_cols;
    for (const BlockRef& blk : layout) {
        if (blk.type == BlockRef::Type::Jordan) {
            for (std::size_t c : blk.e_cols) jordan_cols.push_back(c);
            for (std::size_t c : blk.f_cols) jordan_cols.push_back(c);
        } else {
            for (std::size_t c : blk.f_cols) core_cols.push_back(c);
        }
    }
    std::size_t jdim = jordan_cols.size();

    FFCensus out;
    out.prime = p;
    out.invariants = cinv;

    // Jordan-part forms and recursion operator mod p.
    MatQ AJ(jdim, jdim), BJ(jdim, jdim);
    for (std::size_t i = 0; i < jdim; ++i)
        for (std::size_t j = 0; j < jdim; ++j) {
            AJ.at(i, j) = pen.A.at(jordan_cols[i], jordan_cols[j]);
            BJ.at(i, j) = pen.B.at(jordan_cols[i], jordan_cols[j]);
        }
    auto lift_to_ambient = [&](const std::vector<std::vector<GFp>>& wrows) {
        std::vector<std::vector<GFp>> rows;
        for (std::size_t c : core_cols) {
            std::vector<GFp> r(dim, GFp(p, 0));
            r[c] = GFp(p, 1);
            rows.push_back(r);
        }
        for (const auto& w : wrows) {
            std::vector<GFp> r(dim, GFp(p, 0));
            for (std::size_t i = 0; i < jdim; ++i) r[jordan_cols[i]] = w[i];
            rows.push_back(r);
        }
        return SubspaceP(dim, MatP::from_rows(rows));
    };

    if (jdim == 0) {
        out.subspaces.push_back(lift_to_ambient({}));
        return out;
    }

    MatP Bp = detail::to_gfp(BJ, p);
    MatP Pp = detail::to_gfp(inverse(BJ) * AJ, p);

    detail::IsotropicEnumerator en(Bp, jdim / 2, p);
    auto profiles = detail::IsotropicEnumerator::profiles(jdim, jdim / 2);
    std::size_t nworkers = std::max<std::size_t>(1, std::min(workers, profiles.size()));
    std::vector<std::vector<SubspaceP>> found(profiles.size());

    auto run_profile = [&](std::size_t idx) {
        if (p == 2 && jdim <= 16) {
            detail::Gf2IsotropicEnumerator local(Bp, Pp, jdim / 2);
            local.enumerate_profile(profiles[idx], [&](const std::vector<std::uint32_t>& masks) {
                std::vector<std::vector<GFp>> rows;
                for (std::uint32_t m : masks) {
                    std::vector<GFp> row(jdim, GFp(2, 0));
                    for (std::size_t c = 0; c < jdim; ++c)
                        if ((m >> c) & 1) row[c] = GFp(2, 1);
                    rows.push_back(std::move(row));
                }
                found[idx].push_back(lift_to_ambient(rows));
            });
            return;
        }
        detail::IsotropicEnumerator local(Bp, jdim / 2, p);
        local.enumerate_profile(profiles[idx], [&](const std::vector<std::vector<GFp>>& rows) {
            // P-invariance of the row span.
            SubspaceP w(jdim, MatP::from_rows(rows));
            if (!w.is_invariant_under(Pp)) return;
            found[idx].push_back(lift_to_ambient(rows));
        });
    };
    if (nworkers <= 1) {
        for (std::size_t i = 0; i < profiles.size(); ++i) run_profile(i);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (profiles.size() + nworkers - 1) / nworkers;
        for (std::size_t w = 0; w < nworkers; ++w)
            pool.emplace_back([&, w]() {
                for (std::size_t i = w * chunk; i < std::min(profiles.size(), (w + 1) * chunk); ++i)
                    run_profile(i);
            });
        for (auto& t : pool) t.join();
    }
    for (auto& bucket : found)
        for (auto& s : bucket) out.subspaces.push_back(std::move(s));
    return out;
}

// Groups the census by the orbit invariant computed mod p. Keys are the
// stringified invariants; mod-p classification anomalies are surfaced under
// an explicit key instead of being folded into a neighbor.
inline std::map<std::string, std::size_t> ff_orbit_histogram(const JKInvariants& inv,
                                                             std::uint32_t p,
                                                             std::size_t workers = 1) {
    FFCensus census = ff_enumerate_bilagrangians(inv, p, workers);
    std::map<std::string, std::size_t> hist;
    JKInvariants cinv = census.invariants;
    if (cinv.jordan.empty()) {
        if (!census.subspaces.empty()) hist["core"] = census.subspaces.size();
        return hist;
    }
    for (const auto& j : cinv.jordan)
        if (j.eigenvalue != cinv.jordan[0].eigenvalue)
            throw unsupported("UnsupportedAmbient",
                              "mod-p histogram keys need a single Jordan eigenvalue");

    // Jordan coordinates and nilpotent structure mod p (eigenvalue normalized
    // away: the standard nilpotent model has the same block sizes).
    JKInvariants nil = cinv;
    for (auto& j : nil.jordan) j.eigenvalue = Eigenvalue(Rat(0));
    nil.canonicalize();
    auto [pen, layout] = synthesize_with_layout(nil);
    std::vector<std::size_t> jordan_cols;
    for (const BlockRef& blk : layout)
        if (blk.type == BlockRef::Type::Jordan) {
            for (std::size_t c : blk.e_cols) jordan_cols.push_back(c);
            for (std::size_t c : blk.f_cols) jordan_cols.push_back(c);
        }
    std::size_t jdim = jordan_cols.size();
    MatQ AJ(jdim, jdim), BJ(jdim, jdim);
    for (std::size_t i = 0; i < jdim; ++i)
        for (std::size_t j = 0; j < jdim; ++j) {
            AJ.at(i, j) = pen.A.at(jordan_cols[i], jordan_cols[j]);
            BJ.at(i, j) = pen.B.at(jordan_cols[i], jordan_cols[j]);
        }
    MatP Pp = detail::to_gfp(inverse(BJ) * AJ, p);
    NilpotentSpace<GFp> ns = make_nilpotent_space(Pp);
    auto cls = size_classes(ns);

    // Map ambient census subspaces back to Jordan coordinates.
    std::map<std::size_t, std::size_t> col_of;
    for (std::size_t i = 0; i < jdim; ++i) col_of[jordan_cols[i]] = i;
    for (const SubspaceP& amb : census.subspaces) {
        std::vector<std::vector<GFp>> wrows;
        for (std::size_t r = 0; r < amb.dim(); ++r) {
            std::vector<GFp> row(jdim, GFp(p, 0));
            bool jordan_part = false;
            for (std::size_t c = 0; c < amb.ambient(); ++c) {
                if (amb.basis().at(r, c).is_zero()) continue;
                auto it = col_of.find(c);
                if (it == col_of.end()) {
                    jordan_part = false;
                    break;
                }
                jordan_part = true;
                row[it->second] = amb.basis().at(r, c);
            }
            if (jordan_part) wrows.push_back(row);
        }
        SubspaceP w = SubspaceP::span_of(jdim, wrows);
        std::string key;
        try {
            if (auto ty = semisimple_type_table(ns, w)) {
                key = "semisimple " + ty->str();
            } else if (cls.size() == 2 && ns.halfsizes.size() == 2) {
                key = classify_two_blocks_impl(ns, w).str();
            } else {
                key = height_profile_impl(ns, w).str();
            }
        } catch (const Error& e) {
            key = "anomaly: " + e.kind();
        }
        ++hist[key];
    }
    return hist;
}

} // namespace pencil_lab
