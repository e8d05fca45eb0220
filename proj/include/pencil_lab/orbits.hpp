#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pencil_lab/subspace_ops.hpp"

namespace pencil_lab {

// ---------------------------------------------------------------------------
// Skeleton of a nilpotent bi-Poisson space over a field F: the recursion
// operator plus cached kernel/image filtrations. All orbit invariants below
// are computed from this data only, so they work verbatim over GF(p).

template <class F>
struct NilpotentSpace {
    Matrix<F> P;
    std::size_t height = 0;                  // height of the operator
    std::vector<std::size_t> halfsizes;      // descending
    std::vector<SubspaceT<F>> ker_pow;       // [j] = Ker P^j, j = 0..height
    std::vector<SubspaceT<F>> im_pow;        // [j] = Im P^j
};

template <class F>
NilpotentSpace<F> make_nilpotent_space(const Matrix<F>& P) {
    NilpotentSpace<F> ns;
    ns.P = P;
    std::size_t n = P.rows();
    std::vector<std::size_t> op_sizes = detail::nilpotent_block_sizes(P);
    for (std::size_t i = 0; i < op_sizes.size(); i += 2) {
        if (i + 1 >= op_sizes.size() || op_sizes[i] != op_sizes[i + 1])
            throw invalid_input("InternalError", "operator blocks of a skew pencil must pair up");
        ns.halfsizes.push_back(op_sizes[i]);
    }
    ns.height = ns.halfsizes.empty() ? 0 : ns.halfsizes.front();
    Matrix<F> power = Matrix<F>::identity(n);
    for (std::size_t j = 0; j <= ns.height; ++j) {
        ns.ker_pow.push_back(kernel(power));
        ns.im_pow.push_back(SubspaceT<F>(n, power.transpose()));
        power = power * P;
    }
    return ns;
}

inline NilpotentSpace<Rat> nilpotent_space_of(const JordanContext& ctx) {
    if (!ctx.plain_generators() || !is_nilpotent(ctx.P))
        throw invalid_input("NotStandardLayout",
                            "orbit invariants need a nilpotent context with plain generators");
    return make_nilpotent_space(ctx.P);
}

// Distinct half-sizes (descending) with multiplicities.
template <class F>
std::vector<std::pair<std::size_t, std::size_t>> size_classes(const NilpotentSpace<F>& ns) {
    std::vector<std::pair<std::size_t, std::size_t>> cls;
    for (std::size_t h : ns.halfsizes) {
        if (!cls.empty() && cls.back().first == h)
            ++cls.back().second;
        else
            cls.emplace_back(h, 1);
    }
    return cls;
}

// Clamped filtration accessors: kernel powers saturate at the full space,
// image powers at zero.
template <class F>
const SubspaceT<F>& ker_at(const NilpotentSpace<F>& ns, std::size_t j) {
    return ns.ker_pow[std::min(j, ns.height)];
}
template <class F>
SubspaceT<F> im_at(const NilpotentSpace<F>& ns, std::size_t j) {
    if (j <= ns.height) return ns.im_pow[j];
    return SubspaceT<F>::zero(ns.P.rows());
}

template <class F>
std::size_t subspace_height(const NilpotentSpace<F>& ns, const SubspaceT<F>& L) {
    for (std::size_t m = 0; m <= ns.height; ++m)
        if (ns.ker_pow[m].contains(L)) return m;
    throw invalid_input("InternalError", "subspace escapes every kernel power");
}

template <class F>
std::size_t subspace_depth(const NilpotentSpace<F>& ns, const SubspaceT<F>& L) {
    std::size_t d = 0;
    for (std::size_t m = ns.height; m >= 1; --m)
        if (ns.im_pow[m].contains(L)) {
            d = m;
            break;
        }
    return d;
}

// ---------------------------------------------------------------------------
// Height profiles

struct HeightProfile {
    std::size_t h = 0; // min m with L <= Ker P^m
    std::size_t d = 0; // max m with L <= Im P^m
    // table[a][b] = dim (L meet Ker P^a meet Im P^b), 0 <= a, b <= height(V)
    std::vector<std::vector<std::size_t>> table;

    friend bool operator==(const HeightProfile& x, const HeightProfile& y) {
        return x.h == y.h && x.d == y.d && x.table == y.table;
    }
    std::string str() const {
        std::string s = "h=" + std::to_string(h) + " d=" + std::to_string(d) + " [";
        for (const auto& row : table)
            for (std::size_t v : row) s += std::to_string(v) + ",";
        s += "]";
        return s;
    }
};

template <class F>
HeightProfile height_profile_impl(const NilpotentSpace<F>& ns, const SubspaceT<F>& L) {
    HeightProfile hp;
    hp.h = subspace_height(ns, L);
    hp.d = subspace_depth(ns, L);
    hp.table.assign(ns.height + 1, std::vector<std::size_t>(ns.height + 1, 0));
    for (std::size_t a = 0; a <= ns.height; ++a)
        for (std::size_t b = 0; b <= ns.height; ++b)
            hp.table[a][b] = meet(meet(L, ns.ker_pow[a]), ns.im_pow[b]).dim();
    return hp;
}

// ---------------------------------------------------------------------------
// Jordan type of the restriction P|_L (Weyr sequence of intersections)

template <class F>
std::vector<std::size_t> restriction_jordan_type_impl(const NilpotentSpace<F>& ns,
                                                      const SubspaceT<F>& L) {
    if (!L.is_invariant_under(ns.P))
        throw invalid_input("NotInvariant", "restriction type needs an invariant subspace");
    std::vector<std::size_t> w{0};
    for (std::size_t j = 1; j <= ns.height; ++j) w.push_back(meet(L, ns.ker_pow[j]).dim());
    std::vector<std::size_t> partition;
    for (std::size_t s = ns.height; s >= 1; --s) {
        std::size_t geq_s = w[s] - w[s - 1];
        std::size_t geq_s1 = (s + 1 <= ns.height) ? w[s + 1] - w[s] : 0;
        for (std::size_t c = 0; c < geq_s - geq_s1; ++c) partition.push_back(s);
    }
    return partition;
}

// ---------------------------------------------------------------------------
// Genericity (membership in the unique top orbit)

template <class F>
bool is_generic_impl(const NilpotentSpace<F>& ns, const SubspaceT<F>& L) {
    for (auto [n, l] : size_classes(ns)) {
        SubspaceT<F> w = join(meet(ns.ker_pow[n], ns.im_pow[1]), ns.ker_pow[n - 1]);
        std::size_t top = join(meet(L, ns.ker_pow[n]), w).dim() - w.dim();
        if (top != l) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Invariant subspace lattice (single eigenvalue)

// Valid height tuples against descending half-sizes:
// 0 <= h_i - h_{i+1} <= n_i - n_{i+1}, with n_{N+1} = 0.
inline std::vector<std::vector<std::size_t>> invariant_height_tuples(
    const std::vector<std::size_t>& halfsizes) {
    std::vector<std::vector<std::size_t>> tuples;
    std::size_t N = halfsizes.size();
    std::vector<std::size_t> deltas(N, 0);
    auto bound = [&](std::size_t i) {
        return halfsizes[i] - (i + 1 < N ? halfsizes[i + 1] : 0);
    };
    while (true) {
        std::vector<std::size_t> h(N);
        std::size_t acc = 0;
        for (std::size_t i = N; i-- > 0;) {
            acc += deltas[i];
            h[i] = acc;
        }
        tuples.push_back(h);
        std::size_t i = 0;
        while (i < N && deltas[i] == bound(i)) deltas[i++] = 0;
        if (i == N) break;
        ++deltas[i];
    }
    std::sort(tuples.begin(), tuples.end());
    return tuples;
}

// Materializes the invariant subspace with the given height tuple (one height
// per size class, descending class order): sum over classes of
// Ker P^{h_i} meet Im P^{n_i - h_i}.
template <class F>
SubspaceT<F> invariant_subspace_of(const NilpotentSpace<F>& ns,
                                   const std::vector<std::size_t>& class_heights) {
    auto cls = size_classes(ns);
    SubspaceT<F> u = SubspaceT<F>::zero(ns.P.rows());
    for (std::size_t i = 0; i < cls.size(); ++i) {
        std::size_t n = cls[i].first, h = class_heights[i];
        u = join(u, meet(ns.ker_pow[h], ns.im_pow[n - h]));
    }
    return u;
}

// ---------------------------------------------------------------------------
// Semisimple types

struct SemisimpleType {
    // (height, half-size) pairs, sorted by half-size descending then height
    // descending.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    void canonicalize() {
        std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first > b.first;
        });
    }
    friend bool operator==(const SemisimpleType& a, const SemisimpleType& b) {
        return a.pairs == b.pairs;
    }
    friend bool operator!=(const SemisimpleType& a, const SemisimpleType& b) { return !(a == b); }
    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (i) s += ",";
            s += "(" + std::to_string(pairs[i].first) + "," + std::to_string(pairs[i].second) + ")";
        }
        return s + "}";
    }
};

namespace detail {

// All non-increasing height multisets of length l with values in
// [ceil(n/2), n].
inline std::vector<std::vector<std::size_t>> height_multisets(std::size_t n, std::size_t l) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t remaining, std::size_t maxv) -> void {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        for (std::size_t v = maxv; v + 1 >= (n + 1) / 2 + 1; --v) {
            cur.push_back(v);
            self(self, remaining - 1, v);
            cur.pop_back();
        }
    };
    rec(rec, l, n);
    return out;
}

} // namespace detail

// Type detection from the basis-independent table of intersection dimensions
// with the invariant lattice; nullopt when no semisimple profile fits.
template <class F>
std::optional<SemisimpleType> semisimple_type_table(const NilpotentSpace<F>& ns,
                                                    const SubspaceT<F>& L) {
    auto cls = size_classes(ns);
    std::vector<std::size_t> class_sizes;
    for (auto [n, l] : cls) class_sizes.push_back(n);

    std::vector<std::vector<std::size_t>> lattice = invariant_height_tuples(class_sizes);
    std::vector<std::size_t> actual;
    for (const auto& tuple : lattice) actual.push_back(meet(L, invariant_subspace_of(ns, tuple)).dim());

    // Candidate types: a height multiset per size class.
    std::vector<std::vector<std::vector<std::size_t>>> per_class;
    for (auto [n, l] : cls) per_class.push_back(detail::height_multisets(n, l));
    std::vector<std::size_t> pick(cls.size(), 0);
    while (true) {
        bool ok = true;
        for (std::size_t t = 0; t < lattice.size() && ok; ++t) {
            std::size_t predicted = 0;
            for (std::size_t c = 0; c < cls.size(); ++c) {
                std::size_t n = cls[c].first, k = lattice[t][c];
                for (std::size_t h : per_class[c][pick[c]])
                    predicted += std::min(h, k) + std::min(n - h, k);
            }
            ok = predicted == actual[t];
        }
        if (ok) {
            SemisimpleType ty;
            for (std::size_t c = 0; c < cls.size(); ++c)
                for (std::size_t h : per_class[c][pick[c]]) ty.pairs.emplace_back(h, cls[c].first);
            ty.canonicalize();
            return ty;
        }
        std::size_t i = 0;
        while (i < cls.size() && pick[i] + 1 == per_class[i].size()) pick[i++] = 0;
        if (i == cls.size()) break;
        ++pick[i];
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Orbit descriptors

struct OrbitDescriptor {
    enum class Variant { Semisimple, TypeI, TypeII, Unsupported };
    Variant variant = Variant::Unsupported;
    SemisimpleType type;                        // Semisimple
    std::size_t h = 0, d = 0, r = 0;            // two-block parameters
    int delta = 0;                              // TypeII
    std::optional<std::size_t> z;               // TypeII with delta = 1
    std::string reason;                         // Unsupported

    static OrbitDescriptor semisimple(SemisimpleType t) {
        OrbitDescriptor o;
        o.variant = Variant::Semisimple;
        t.canonicalize();
        o.type = std::move(t);
        return o;
    }
    static OrbitDescriptor type1(std::size_t h, std::size_t d, std::size_t r) {
        OrbitDescriptor o;
        o.variant = Variant::TypeI;
        o.h = h;
        o.d = d;
        o.r = r;
        return o;
    }
    static OrbitDescriptor type2(std::size_t h, std::size_t d, std::size_t r, int delta,
                                 std::optional<std::size_t> z = std::nullopt) {
        OrbitDescriptor o;
        o.variant = Variant::TypeII;
        o.h = h;
        o.d = d;
        o.r = r;
        o.delta = delta;
        o.z = z;
        return o;
    }
    static OrbitDescriptor not_supported(std::string why) {
        OrbitDescriptor o;
        o.variant = Variant::Unsupported;
        o.reason = std::move(why);
        return o;
    }

    friend bool operator==(const OrbitDescriptor& a, const OrbitDescriptor& b) {
        if (a.variant != b.variant) return false;
        switch (a.variant) {
            case Variant::Semisimple: return a.type == b.type;
            case Variant::TypeI: return a.h == b.h && a.d == b.d && a.r == b.r;
            case Variant::TypeII:
                return a.h == b.h && a.d == b.d && a.r == b.r && a.delta == b.delta && a.z == b.z;
            case Variant::Unsupported: return false; // never identifies an orbit
        }
        return false;
    }
    friend bool operator!=(const OrbitDescriptor& a, const OrbitDescriptor& b) { return !(a == b); }

    std::string str() const {
        switch (variant) {
            case Variant::Semisimple: return "semisimple " + type.str();
            case Variant::TypeI:
                return "type1 {h:" + std::to_string(h) + ",d:" + std::to_string(d) +
                       ",r:" + std::to_string(r) + "}";
            case Variant::TypeII:
                return "type2 {h:" + std::to_string(h) + ",d:" + std::to_string(d) +
                       ",r:" + std::to_string(r) + ",delta:" + std::to_string(delta) +
                       (z ? ",z:" + std::to_string(*z) : "") + "}";
            case Variant::Unsupported: return "unsupported (" + reason + ")";
        }
        return "?";
    }
};

// Validity of two-block indecomposable parameters against the canonical-form
// constraints. The reason string names the violated inequality.
inline bool valid_type1(std::size_t n1, std::size_t n2, std::size_t h, std::size_t d,
                        std::size_t r, std::string* why = nullptr) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (r < 1) return fail("r > 0");
    if (h > n1 || h < r) return fail("0 <= h - r and h <= n1");
    if (d + r > n2) return fail("q2 = n2 - d - r >= 0");
    long p1 = static_cast<long>(h - r), q1 = static_cast<long>(n1 - h);
    long p2 = static_cast<long>(d), q2 = static_cast<long>(n2 - d - r);
    if (!(p1 >= q1)) return fail("p1 >= q1");
    if (!(q1 > q2)) return fail("q1 > q2");
    if (!(q2 > p2)) return fail("q2 > p2");
    return true;
}

inline bool valid_type2(std::size_t n1, std::size_t n2, std::size_t h, std::size_t d,
                        std::size_t r, int delta, std::optional<std::size_t> z,
                        std::string* why = nullptr) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (r < 1) return fail("r > 0");
    if (h > n1 || h < r) return fail("0 <= h - r and h <= n1");
    if (d + r > n2) return fail("p2 = n2 - d - r >= 0");
    long p1 = static_cast<long>(h - r), q1 = static_cast<long>(n1 - h);
    long p2 = static_cast<long>(n2 - d - r), q2 = static_cast<long>(d);
    if (!(p1 >= q1)) return fail("p1 >= q1");
    if (!(q1 > q2)) return fail("q1 > q2");
    if (!(p1 > p2)) return fail("p1 > p2");
    if (!(p2 >= q2)) return fail("p2 >= q2");
    if (p1 == q1 && p2 != q2) return fail("p1 = q1 requires p2 = q2");
    if (delta != 0 && delta != 1) return fail("delta in {0, 1}");
    if (delta == 0 && z) return fail("z only accompanies delta = 1");
    if (delta == 1) {
        if (!z) return fail("delta = 1 requires z");
        long zz = static_cast<long>(*z);
        long lo = std::max(p2 - static_cast<long>(r), q2);
        long hi = std::min(p2, q1);
        if (!(lo < zz - static_cast<long>(r) && zz - static_cast<long>(r) < hi))
            return fail("max(p2 - r, q2) < z - r < min(p2, q1)");
    }
    return true;
}

// Type II-S: the boundary subfamily r = 2h - n1 = n2 - 2d with delta = 0.
inline bool is_type2_special(std::size_t n1, std::size_t n2, const OrbitDescriptor& desc) {
    return desc.variant == OrbitDescriptor::Variant::TypeII && desc.delta == 0 &&
           desc.r + n1 == 2 * desc.h && desc.r + 2 * desc.d == n2;
}

namespace detail {

// Nilpotent operator induced on L / (L meet U), as a matrix in canonical
// complement coordinates; both subspaces must be P-invariant.
template <class F>
std::vector<std::size_t> quotient_restriction_partition(const NilpotentSpace<F>& ns,
                                                        const SubspaceT<F>& L,
                                                        const SubspaceT<F>& U) {
    // Coordinates of L: rows of L.basis(). Express P|_L in them.
    std::size_t m = L.dim();
    Matrix<F> lt = L.basis().transpose();
    Matrix<F> PL(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<F> img = ns.P.apply(L.basis().row(i));
        std::vector<F> co;
        if (!solve_linear(lt, img, co))
            throw invalid_input("NotInvariant", "subspace is not invariant");
        for (std::size_t j = 0; j < m; ++j) PL.at(j, i) = co[j];
    }
    SubspaceT<F> lu = meet(L, U);
    // Coordinates of L meet U inside L.
    std::vector<std::vector<F>> lu_coords;
    for (std::size_t i = 0; i < lu.dim(); ++i) {
        std::vector<F> co;
        if (!solve_linear(lt, lu.basis().row(i), co))
            throw invalid_input("InternalError", "intersection must embed in L");
        lu_coords.push_back(co);
    }
    SubspaceT<F> inner = SubspaceT<F>::span_of(m, lu_coords);
    // Complement representatives of inner inside F^m.
    std::vector<std::vector<F>> reps;
    Matrix<F> id = Matrix<F>::identity(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<F> r = inner.reduce_mod(id.row(i));
        bool zero = true;
        for (const F& x : r) zero = zero && field_traits<F>::is_zero(x);
        if (!zero) reps.push_back(r);
    }
    SubspaceT<F> comp = SubspaceT<F>::span_of(m, reps);
    std::size_t q = comp.dim();
    if (q == 0) return {};
    // Induced operator: project P|_L of each representative back to the
    // complement coordinates modulo inner.
    Matrix<F> stack = inner.basis().vstack(comp.basis());
    Matrix<F> op(q, q);
    for (std::size_t i = 0; i < q; ++i) {
        std::vector<F> img = PL.apply(comp.basis().row(i));
        std::vector<F> co;
        if (!solve_linear(stack.transpose(), img, co))
            throw invalid_input("InternalError", "quotient operator must close");
        for (std::size_t j = 0; j < q; ++j) op.at(j, i) = co[inner.dim() + j];
    }
    return nilpotent_block_sizes(op);
}

inline std::vector<std::size_t> clean_partition(std::vector<long> parts) {
    std::vector<std::size_t> out;
    for (long p : parts)
        if (p > 0) out.push_back(static_cast<std::size_t>(p));
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

} // namespace detail

// Full orbit classification over a sum of two distinct Jordan blocks.
template <class F>
OrbitDescriptor classify_two_blocks_impl(const NilpotentSpace<F>& ns, const SubspaceT<F>& L) {
    auto cls = size_classes(ns);
    if (ns.halfsizes.size() != 2 || cls.size() != 2)
        throw invalid_input("NotTwoBlocks", "ambient must be two Jordan blocks of distinct sizes");
    long n1 = static_cast<long>(ns.halfsizes[0]), n2 = static_cast<long>(ns.halfsizes[1]);

    if (auto ty = semisimple_type_table(ns, L)) return OrbitDescriptor::semisimple(*ty);

    long h = static_cast<long>(subspace_height(ns, L));
    long d = static_cast<long>(subspace_depth(ns, L));
    std::vector<std::size_t> part_L = restriction_jordan_type_impl(ns, L);
    SubspaceT<F> deep = meet(L, im_at(ns, d + 1));
    bool type1 = deep.dim() > meet(deep, ker_at(ns, h - 1)).dim();

    // Quotient partition after reducing by U = J1^{<= n1 - h} + J2^{<= d}.
    std::vector<std::size_t> part_Q;
    {
        std::vector<std::size_t> tuple{static_cast<std::size_t>(n1 - h), static_cast<std::size_t>(d)};
        SubspaceT<F> U = invariant_subspace_of(ns, tuple);
        part_Q = detail::quotient_restriction_partition(ns, L, U);
    }

    // Match against the invariants of every admissible descriptor with these
    // h and d; the canonical-form uniqueness theorem makes the match unique.
    std::vector<OrbitDescriptor> matches;
    auto try_candidate = [&](const OrbitDescriptor& desc, bool cand_type1, long x) {
        std::vector<std::size_t> pl = detail::clean_partition(
            {h, n1 - h + static_cast<long>(desc.r), n2 - d - static_cast<long>(desc.r), d});
        if (pl != part_L) return;
        std::vector<std::size_t> pq = detail::clean_partition({2 * h - n1, x, n2 - 2 * d - x});
        if (pq != part_Q) return;
        if (cand_type1 != type1) return;
        matches.push_back(desc);
    };
    for (long r = 1; r <= n2; ++r) {
        if (valid_type1(n1, n2, h, d, r))
            try_candidate(OrbitDescriptor::type1(h, d, r), true, n2 - 2 * d);
        if (valid_type2(n1, n2, h, d, r, 0, std::nullopt))
            try_candidate(OrbitDescriptor::type2(h, d, r, 0), false, r);
        for (long z = 1; z <= n2; ++z)
            if (valid_type2(n1, n2, h, d, r, 1, z))
                try_candidate(OrbitDescriptor::type2(h, d, r, 1, z), false, z - d);
    }
    if (matches.size() != 1)
        throw invalid_input("InternalError",
                            "two-block classification matched " + std::to_string(matches.size()) +
                                " candidate descriptors");
    return matches[0];
}

// ---------------------------------------------------------------------------
// Rational front-ends

inline HeightProfile height_profile(const JordanContext& ctx, const Subspace& L) {
    return height_profile_impl(nilpotent_space_of(ctx), L);
}

inline std::vector<std::size_t> restriction_jordan_type(const JordanContext& ctx,
                                                        const Subspace& L) {
    return restriction_jordan_type_impl(nilpotent_space_of(ctx), L);
}

inline bool is_generic(const JordanContext& ctx, const Subspace& L) {
    return is_generic_impl(nilpotent_space_of(ctx), L);
}

inline SemisimpleType semisimple_type(const JordanContext& ctx, const Subspace& L) {
    auto ty = semisimple_type_table(nilpotent_space_of(ctx), L);
    if (!ty)
        throw Error(ErrorClass::CheckFailed, "NotSemisimple",
                    "no semisimple type matches the intersection table");
    return *ty;
}

inline OrbitDescriptor classify_two_blocks(const JordanContext& ctx, const Subspace& L) {
    return classify_two_blocks_impl(nilpotent_space_of(ctx), L);
}

// ---------------------------------------------------------------------------
// Constructive semisimple decomposition (marked-subspace extraction)

struct SemisimpleComponent {
    MatQ block_basis;   // 2n rows: ambient vectors e_1..e_n, f_1..f_n
    Subspace component; // L meet block, in ambient coordinates
    std::size_t halfsize = 0;
    std::size_t height = 0;
};

struct SemisimpleDecomposition {
    std::vector<SemisimpleComponent> components;
    bool complete = false;
    // The undecomposable remainder when complete is false:
    Pencil residue_pencil;
    MatQ residue_embedding;     // rows: ambient basis of the residue
    Subspace residue_subspace;  // L meet residue, in residue coordinates

    SemisimpleType type() const {
        SemisimpleType t;
        for (const auto& c : components) t.pairs.emplace_back(c.height, c.halfsize);
        t.canonicalize();
        return t;
    }
};

inline SemisimpleDecomposition semisimple_decompose(const JordanContext& ctx, const Subspace& L) {
    if (!ctx.plain_generators() || !is_nilpotent(ctx.P))
        throw invalid_input("NotStandardLayout",
                            "decomposition needs a nilpotent context with plain generators");
    std::size_t dim = ctx.dim();
    SemisimpleDecomposition out;
    MatQ frame = MatQ::identity(dim);

    while (true) {
        std::size_t m = frame.rows();
        if (m == 0) {
            out.complete = true;
            return out;
        }
        MatQ Ar(m, m), Br(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                Ar.at(i, j) = ctx.pencil.A.eval(frame.row(i), frame.row(j));
                Br.at(i, j) = ctx.pencil.B.eval(frame.row(i), frame.row(j));
            }
        MatQ Pr = inverse(Br) * Ar;
        NilpotentSpace<Rat> ns = make_nilpotent_space(Pr);

        // L in frame coordinates.
        Subspace l_amb = meet(L, Subspace(dim, frame));
        std::vector<std::vector<Rat>> coords;
        for (std::size_t i = 0; i < l_amb.dim(); ++i) {
            std::vector<Rat> c;
            if (!solve_linear(frame.transpose(), l_amb.basis().row(i), c))
                throw invalid_input("InternalError", "restriction must lie in the frame span");
            coords.push_back(c);
        }
        Subspace lf = Subspace::span_of(m, coords);
        std::size_t h = subspace_height(ns, lf);

        // Try to split off one block of half-size nb >= h whose chain through
        // a maximal-height vector of L extends to a V-chain.
        bool extracted = false;
        std::vector<std::size_t> sizes;
        for (auto [n, l] : size_classes(ns))
            if (n >= h && n <= 2 * h) sizes.push_back(n);
        for (std::size_t nb : sizes) {
            Subspace pool = meet(lf, ns.im_pow[nb - h]);
            // Deterministic candidate vectors of height h in the pool.
            std::vector<std::vector<Rat>> cands;
            for (std::size_t i = 0; i < pool.dim(); ++i)
                if (detail::vector_height(Pr, pool.basis().row(i)) == h)
                    cands.push_back(pool.basis().row(i));
            std::size_t single = cands.size();
            for (std::size_t i = 0; i < single; ++i)
                for (std::size_t j = 0; j < pool.dim(); ++j) {
                    if (pool.basis().row(j) == cands[i]) continue;
                    for (long t = 1; t <= 2; ++t) {
                        std::vector<Rat> mix = cands[i];
                        for (std::size_t c = 0; c < m; ++c)
                            mix[c] += Rat(t) * pool.basis().at(j, c);
                        if (detail::vector_height(Pr, mix) == h) cands.push_back(mix);
                    }
                }
            for (const auto& v : cands) {
                std::vector<Rat> e1;
                if (!solve_linear(mat_pow(Pr, nb - h), v, e1)) continue;
                if (detail::vector_height(Pr, e1) != nb) continue;
                std::vector<std::vector<Rat>> e_chain{e1};
                for (std::size_t i = 1; i < nb; ++i) e_chain.push_back(Pr.apply(e_chain.back()));
                MatQ constraints(nb, m);
                for (std::size_t i = 0; i < nb; ++i) {
                    std::vector<Rat> br(m, Rat(0));
                    for (std::size_t a = 0; a < m; ++a)
                        for (std::size_t b = 0; b < m; ++b) br[b] += e_chain[i][a] * Br.at(a, b);
                    constraints.set_row(i, br);
                }
                std::vector<Rat> rhs(nb, Rat(0));
                rhs[nb - 1] = Rat(1);
                std::vector<Rat> f_top;
                if (!solve_linear(constraints, rhs, f_top)) continue;
                std::vector<std::vector<Rat>> f_chain(nb);
                f_chain[nb - 1] = f_top;
                for (std::size_t i = 1; i < nb; ++i)
                    f_chain[nb - 1 - i] = Pr.apply(f_chain[nb - i]);
                MatQ block_rows(2 * nb, m);
                for (std::size_t i = 0; i < nb; ++i) block_rows.set_row(i, e_chain[i]);
                for (std::size_t i = 0; i < nb; ++i) block_rows.set_row(nb + i, f_chain[i]);
                Subspace vblock(m, block_rows);
                if (vblock.dim() != 2 * nb) continue;
                Subspace comp = kernel(block_rows * Br);
                if (comp.dim() != m - 2 * nb) continue;
                std::size_t inside = meet(lf, vblock).dim();
                std::size_t outside = meet(lf, comp).dim();
                if (inside != nb || inside + outside != lf.dim()) continue;

                // Success: record the component in ambient coordinates.
                auto lift = [&](const std::vector<Rat>& x) {
                    std::vector<Rat> amb(dim, Rat(0));
                    for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t j = 0; j < dim; ++j) amb[j] += x[i] * frame.at(i, j);
                    return amb;
                };
                SemisimpleComponent scomp;
                scomp.block_basis = MatQ(2 * nb, dim);
                for (std::size_t i = 0; i < nb; ++i) scomp.block_basis.set_row(i, lift(e_chain[i]));
                for (std::size_t i = 0; i < nb; ++i)
                    scomp.block_basis.set_row(nb + i, lift(f_chain[i]));
                std::vector<std::vector<Rat>> comp_rows;
                Subspace inside_sub = meet(lf, vblock);
                for (std::size_t i = 0; i < inside_sub.dim(); ++i)
                    comp_rows.push_back(lift(inside_sub.basis().row(i)));
                scomp.component = Subspace::span_of(dim, comp_rows);
                scomp.halfsize = nb;
                scomp.height = h;
                out.components.push_back(scomp);
                frame = comp.basis() * frame;
                extracted = true;
                break;
            }
            if (extracted) break;
        }
        if (!extracted) {
            // Indecomposable residue: report the remaining pencil and the part
            // of L inside it.
            out.complete = false;
            out.residue_pencil = Pencil{m, Ar, Br};
            out.residue_embedding = frame;
            out.residue_subspace = lf;
            return out;
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical representatives

namespace detail {

// Unit vector for a basis symbol of the synthesized two-block layout, with
// out-of-range indices mapping to zero.
struct TwoBlockSymbols {
    std::size_t n1, n2, dim;
    std::vector<Rat> e1(long i) const {
        std::vector<Rat> v(dim, Rat(0));
        if (i >= 1 && i <= static_cast<long>(n1)) v[i - 1] = Rat(1);
        return v;
    }
    std::vector<Rat> f1(long i) const {
        std::vector<Rat> v(dim, Rat(0));
        if (i >= 1 && i <= static_cast<long>(n1)) v[n1 + i - 1] = Rat(1);
        return v;
    }
    std::vector<Rat> e2(long i) const {
        std::vector<Rat> v(dim, Rat(0));
        if (i >= 1 && i <= static_cast<long>(n2)) v[2 * n1 + i - 1] = Rat(1);
        return v;
    }
    std::vector<Rat> f2(long i) const {
        std::vector<Rat> v(dim, Rat(0));
        if (i >= 1 && i <= static_cast<long>(n2)) v[2 * n1 + n2 + i - 1] = Rat(1);
        return v;
    }
    static std::vector<Rat> add(const std::vector<Rat>& a, const std::vector<Rat>& b, long sign = 1) {
        std::vector<Rat> r = a;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += Rat(sign) * b[i];
        return r;
    }
};

} // namespace detail

// A subspace of the synthesized standard-layout pencil whose classification
// equals the descriptor. Works for any single eigenvalue (the span is
// index-based and independent of it).
inline Subspace canonical_representative(const JKInvariants& inv, const OrbitDescriptor& desc) {
    JKInvariants cinv = inv;
    cinv.canonicalize();
    if (!cinv.single_eigenvalue())
        throw invalid_input("InvalidParameters",
                            "canonical representatives need a single-eigenvalue Jordan ambient");
    auto [p, layout] = synthesize_with_layout(cinv);

    if (desc.variant == OrbitDescriptor::Variant::Semisimple) {
        // Pair the (h, n) entries with the layout blocks (both sorted by
        // half-size descending, heights descending inside equal sizes).
        std::vector<std::pair<std::size_t, std::size_t>> pairs = desc.type.pairs;
        SemisimpleType sorted_copy;
        sorted_copy.pairs = pairs;
        sorted_copy.canonicalize();
        pairs = sorted_copy.pairs;
        if (pairs.size() != layout.size())
            throw invalid_input("InvalidParameters", "type has wrong number of blocks");
        std::vector<std::vector<Rat>> rows;
        for (std::size_t b = 0; b < layout.size(); ++b) {
            std::size_t n = layout[b].param, h = pairs[b].first;
            if (pairs[b].second != n)
                throw invalid_input("InvalidParameters", "type half-sizes do not match the ambient");
            if (2 * h < n || h > n)
                throw invalid_input("InvalidParameters", "height must satisfy ceil(n/2) <= h <= n");
            for (std::size_t i = n - h; i < n; ++i) {
                std::vector<Rat> v(p.dim, Rat(0));
                v[layout[b].e_cols[i]] = Rat(1);
                rows.push_back(v);
            }
            for (std::size_t i = 0; i < n - h; ++i) {
                std::vector<Rat> v(p.dim, Rat(0));
                v[layout[b].f_cols[i]] = Rat(1);
                rows.push_back(v);
            }
        }
        return Subspace::span_of(p.dim, rows);
    }

    // Indecomposable representatives need exactly two distinct blocks.
    if (layout.size() != 2 || layout[0].param <= layout[1].param)
        throw invalid_input("InvalidParameters",
                            "indecomposable descriptors need two Jordan blocks with n1 > n2");
    long n1 = static_cast<long>(layout[0].param), n2 = static_cast<long>(layout[1].param);
    detail::TwoBlockSymbols sym{static_cast<std::size_t>(n1), static_cast<std::size_t>(n2), p.dim};
    long h = static_cast<long>(desc.h), d = static_cast<long>(desc.d), r = static_cast<long>(desc.r);

    std::vector<Rat> u, v;
    long p1, q1, p2, q2;
    std::string why;
    if (desc.variant == OrbitDescriptor::Variant::TypeI) {
        if (!valid_type1(n1, n2, desc.h, desc.d, desc.r, &why))
            throw invalid_input("InvalidParameters", why);
        u = detail::TwoBlockSymbols::add(sym.e1(n1 - h + 1), sym.e2(n2 - d - r + 1));
        v = detail::TwoBlockSymbols::add(sym.f1(n1 - h + r), sym.f2(n2 - d), -1);
        p1 = h - r;
        q1 = n1 - h;
        p2 = d;
        q2 = n2 - d - r;
    } else if (desc.variant == OrbitDescriptor::Variant::TypeII) {
        if (!valid_type2(n1, n2, desc.h, desc.d, desc.r, desc.delta, desc.z, &why))
            throw invalid_input("InvalidParameters", why);
        u = detail::TwoBlockSymbols::add(sym.e1(n1 - h + 1), sym.e2(d + 1));
        v = detail::TwoBlockSymbols::add(sym.f1(n1 - h + r), sym.f2(d + r), -1);
        if (desc.delta == 1)
            v = detail::TwoBlockSymbols::add(v, sym.e2(n2 - static_cast<long>(*desc.z) + 1));
        p1 = h - r;
        q1 = n1 - h;
        p2 = n2 - d - r;
        q2 = d;
    } else {
        throw invalid_input("InvalidParameters", "descriptor does not describe an orbit");
    }

    JordanContext ctx = make_nilpotent_context(normalize_to_nilpotent(p, cinv.jordan[0].eigenvalue));
    std::vector<std::vector<Rat>> rows;
    std::vector<Rat> cu = u, cv = v;
    for (long j = 0; j < r; ++j) {
        rows.push_back(cu);
        rows.push_back(cv);
        cu = ctx.P.apply(cu);
        cv = ctx.P.apply(cv);
    }
    for (long i = 0; i < p1; ++i) rows.push_back(sym.e1(n1 - i));
    for (long i = 1; i <= q1; ++i) rows.push_back(sym.f1(i));
    for (long i = 0; i < p2; ++i) rows.push_back(sym.e2(n2 - i));
    for (long i = 1; i <= q2; ++i) rows.push_back(sym.f2(i));
    return Subspace::span_of(p.dim, rows);
}

// ---------------------------------------------------------------------------
// Orbit identity

inline bool same_orbit(const JordanContext& ctx, const Subspace& L1, const Subspace& L2) {
    NilpotentSpace<Rat> ns = nilpotent_space_of(ctx);
    auto t1 = semisimple_type_table(ns, L1);
    auto t2 = semisimple_type_table(ns, L2);
    if (t1 && t2) return *t1 == *t2;
    if (t1.has_value() != t2.has_value()) return false; // semisimplicity is orbit-invariant
    auto cls = size_classes(ns);
    if (cls.size() == 2 && ns.halfsizes.size() == 2)
        return classify_two_blocks_impl(ns, L1) == classify_two_blocks_impl(ns, L2);
    throw unsupported("UnsupportedAmbient",
                      "orbit identity for indecomposable subspaces is only classified over one "
                      "block, equal blocks, or two distinct blocks");
}

// ---------------------------------------------------------------------------
// Vector orbits

inline std::vector<std::size_t> vector_orbit_representative(const JordanContext& ctx,
                                                            const std::vector<Rat>& v) {
    NilpotentSpace<Rat> ns = nilpotent_space_of(ctx);
    auto cls = size_classes(ns);
    std::vector<std::size_t> class_sizes;
    for (auto [n, l] : cls) class_sizes.push_back(n);
    std::vector<std::size_t> best;
    for (const auto& tuple : invariant_height_tuples(class_sizes)) {
        if (!invariant_subspace_of(ns, tuple).contains(v)) continue;
        if (best.empty()) {
            best = tuple;
        } else {
            for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::min(best[i], tuple[i]);
        }
    }
    if (best.empty()) throw invalid_input("InternalError", "full space must contain every vector");
    return best;
}

// ---------------------------------------------------------------------------
// Closed-form counts and dimensions

inline Int binomial(std::size_t n, std::size_t k) {
    if (k > n) return Int(0);
    Int r(1);
    for (std::size_t i = 1; i <= k; ++i) {
        r *= Int(static_cast<long>(n - k + i));
        r /= Int(static_cast<long>(i));
    }
    return r;
}

// dim BLG = sum_j j * n_j over descending half-sizes.
inline std::size_t formula_blg_dim(std::vector<std::size_t> halfsizes) {
    std::sort(halfsizes.begin(), halfsizes.end(), std::greater<>());
    std::size_t s = 0;
    for (std::size_t j = 0; j < halfsizes.size(); ++j) s += (j + 1) * halfsizes[j];
    return s;
}

inline std::size_t formula_one_block_orbits(std::size_t n) { return n / 2 + 1; }

inline Int formula_equal_block_orbits(std::size_t n, std::size_t l) {
    return binomial(n / 2 + l, l);
}

inline Int formula_semisimple_types(const JKInvariants& inv) {
    if (!inv.single_eigenvalue())
        throw invalid_input("QueryShapeMismatch", "type count needs a single-eigenvalue ambient");
    Int prod(1);
    std::vector<std::size_t> hs = inv.halfsizes(inv.jordan.front().eigenvalue);
    std::size_t i = 0;
    while (i < hs.size()) {
        std::size_t j = i;
        while (j < hs.size() && hs[j] == hs[i]) ++j;
        prod *= binomial(hs[i] / 2 + (j - i), j - i);
        i = j;
    }
    return prod;
}

inline Int formula_two_block_semisimple_orbits(std::size_t n1, std::size_t n2) {
    return Int(static_cast<long>(n1 / 2 + 1)) * Int(static_cast<long>(n2 / 2 + 1));
}

// Orbit dimension of a semisimple type (ungrouped form): sum over i <= j of
// Delta_ij with Delta_ii = 2 h_i - n_i.
inline std::size_t formula_semisimple_orbit_dim(const SemisimpleType& type) {
    SemisimpleType t = type;
    t.canonicalize();
    long total = 0;
    std::size_t N = t.pairs.size();
    for (std::size_t i = 0; i < N; ++i) {
        long hi = static_cast<long>(t.pairs[i].first), ni = static_cast<long>(t.pairs[i].second);
        total += 2 * hi - ni;
        for (std::size_t j = i + 1; j < N; ++j) {
            long hj = static_cast<long>(t.pairs[j].first), nj = static_cast<long>(t.pairs[j].second);
            long d1 = std::max<long>(0, hj - (ni - hi));
            long d2 = std::max<long>({0L, hj - hi, (nj - hj) - (ni - hi)});
            total += d1 + d2;
        }
    }
    return static_cast<std::size_t>(total);
}

inline std::size_t formula_type2s_orbit_dim(std::size_t n1, std::size_t n2, std::size_t r) {
    if (n1 <= n2 || (n1 + n2) % 2 != 0)
        throw invalid_input("QueryShapeMismatch",
                            "Type II-S needs two blocks of equal parity with n1 > n2");
    if (r < 1 || r > n2 || (r + n2) % 2 != 0)
        throw invalid_input("QueryShapeMismatch", "r must satisfy 1 <= r <= n2, r = n2 mod 2");
    return 3 * r;
}

} // namespace pencil_lab
