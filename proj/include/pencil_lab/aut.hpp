#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "pencil_lab/pencil.hpp"

namespace pencil_lab {

// Lie algebra {C : C^T A + A C = 0 and C^T B + B C = 0} of infinitesimal
// bi-Poisson automorphisms.
struct AutAlgebra {
    Pencil pencil;
    std::vector<MatQ> basis;
    std::size_t dim() const { return basis.size(); }
};

inline AutAlgebra aut_algebra(const Pencil& p) {
    std::size_t n = p.dim;
    // Unknowns: C as a row-major n^2 vector. Equations: both derivation
    // identities, entry by entry.
    MatQ sys(2 * n * n, n * n);
    auto add_form = [&](const MatQ& F, std::size_t eq_off) {
        // (C^T F + F C)_{ij} = sum_k C_{ki} F_{kj} + F_{ik} C_{kj}
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::size_t eq = eq_off + i * n + j;
                for (std::size_t k = 0; k < n; ++k) {
                    sys.at(eq, k * n + i) += F.at(k, j);
                    sys.at(eq, k * n + j) += F.at(i, k);
                }
            }
    };
    add_form(p.A, 0);
    add_form(p.B, n * n);
    MatQ null_rows = kernel_basis_fraction_free(sys);
    AutAlgebra alg;
    alg.pencil = p;
    for (std::size_t r = 0; r < null_rows.rows(); ++r) {
        MatQ C(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) C.at(i, j) = null_rows.at(r, i * n + j);
        alg.basis.push_back(C);
    }
    return alg;
}

namespace detail {

// Grouped basis bookkeeping for a standard-layout Jordan pencil: per
// eigenvalue, blocks of equal half-size are interleaved so that the
// automorphism algebra becomes banded block-triangular.
struct GroupedLayout {
    // perm[g] = ambient index of grouped coordinate g.
    std::vector<std::size_t> perm;
    struct SizeClass {
        std::size_t halfsize = 0;     // common half-size n
        std::size_t count = 0;        // number of blocks l
        // slot_start[k-1] = first grouped coordinate of the (class, k) slot,
        // each slot holding 2*count coordinates (e's then f's).
        std::vector<std::size_t> slot_start;
    };
    // size classes, outer by eigenvalue then by descending half-size
    std::vector<SizeClass> classes;
};

inline GroupedLayout grouped_layout(const JKInvariants& inv) {
    GroupedLayout gl;
    // Ambient offsets follow the canonical synthesize order.
    std::vector<std::size_t> offset(inv.jordan.size());
    std::size_t off = 0;
    for (std::size_t b = 0; b < inv.jordan.size(); ++b) {
        offset[b] = off;
        off += 2 * inv.jordan[b].halfsize;
    }
    std::size_t b = 0;
    while (b < inv.jordan.size()) {
        // One size class: same eigenvalue, same half-size (canonical order
        // keeps them adjacent).
        std::size_t e = b;
        while (e < inv.jordan.size() && inv.jordan[e].eigenvalue == inv.jordan[b].eigenvalue &&
               inv.jordan[e].halfsize == inv.jordan[b].halfsize)
            ++e;
        GroupedLayout::SizeClass cls;
        cls.halfsize = inv.jordan[b].halfsize;
        cls.count = e - b;
        for (std::size_t k = 1; k <= cls.halfsize; ++k) {
            cls.slot_start.push_back(gl.perm.size());
            for (std::size_t j = b; j < e; ++j) // e^{.j}_k
                gl.perm.push_back(offset[j] + (k - 1));
            for (std::size_t j = b; j < e; ++j) // f^{.j}_{n-k+1}
                gl.perm.push_back(offset[j] + 2 * cls.halfsize - k);
        }
        gl.classes.push_back(cls);
        b = e;
    }
    return gl;
}

inline MatQ to_grouped(const MatQ& ambient_op, const GroupedLayout& gl) {
    std::size_t n = ambient_op.rows();
    MatQ g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g.at(i, j) = ambient_op.at(gl.perm[i], gl.perm[j]);
    return g;
}

inline MatQ to_ambient(const MatQ& grouped_op, const GroupedLayout& gl) {
    std::size_t n = grouped_op.rows();
    MatQ a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a.at(gl.perm[i], gl.perm[j]) = grouped_op.at(i, j);
    return a;
}

inline MatQ exp_nilpotent(const MatQ& N) {
    std::size_t n = N.rows();
    MatQ sum = MatQ::identity(n);
    MatQ term = MatQ::identity(n);
    for (std::size_t j = 1; j <= n; ++j) {
        term = term * N * (Rat(1) / Rat(static_cast<long>(j)));
        if (term.is_zero()) break;
        sum = sum + term;
    }
    return sum;
}

// Q_{2l} = [[0, I], [-I, 0]].
inline MatQ symplectic_gram(std::size_t l) {
    MatQ q(2 * l, 2 * l);
    for (std::size_t i = 0; i < l; ++i) {
        q.at(i, l + i) = Rat(1);
        q.at(l + i, i) = Rat(-1);
    }
    return q;
}

// Product of seeded symplectic transvections x -> x + c * omega(x, v) * v.
inline MatQ random_symplectic(std::size_t l, Rng& rng) {
    MatQ q = symplectic_gram(l);
    MatQ s = MatQ::identity(2 * l);
    std::size_t count = 3 + rng.below(3);
    for (std::size_t t = 0; t < count; ++t) {
        MatQ v(2 * l, 1);
        bool nonzero = false;
        for (std::size_t i = 0; i < 2 * l; ++i) {
            v.at(i, 0) = rng.small_rat(-2, 2);
            nonzero = nonzero || v.at(i, 0) != 0;
        }
        if (!nonzero) v.at(rng.below(2 * l), 0) = Rat(1);
        Rat c = Rat(rng.range(1, 2) * (rng.below(2) ? 1 : -1));
        // T = I - c v v^T Q
        MatQ tv = MatQ::identity(2 * l) - v * v.transpose() * q * c;
        s = s * tv;
    }
    return s;
}

} // namespace detail

// Exact random element of the automorphism group of a standard-layout Jordan
// pencil: a product of a block-diagonal symplectic part and the exponential
// of a nilpotent algebra element. Deterministic in the seed.
inline MatQ random_automorphism(const AutAlgebra& a, std::uint64_t seed) {
    const Pencil& p = a.pencil;
    JKInvariants inv = jk_invariants(p);
    if (!inv.is_jordan() && p.dim > 0)
        throw invalid_input("NotStandardLayout", "pencil must be Jordan for group sampling");
    Pencil std_p = synthesize(inv);
    if (p.A != std_p.A || p.B != std_p.B)
        throw invalid_input("NotStandardLayout", "pencil is not in the standard synthesized layout");
    std::size_t n = p.dim;
    if (n == 0) return MatQ::identity(0);

    Rng rng(seed);
    detail::GroupedLayout gl = detail::grouped_layout(inv);

    // Nilpotent part: a random algebra element minus its repeated diagonal
    // s = 1 component (the latter is itself in the algebra).
    MatQ C(n, n);
    for (const MatQ& e : a.basis) C = C + e * Rat(rng.range(-2, 2));
    MatQ Cg = detail::to_grouped(C, gl);
    MatQ Dg(n, n);
    for (const auto& cls : gl.classes) {
        std::size_t w = 2 * cls.count;
        std::size_t s0 = cls.slot_start[0];
        for (std::size_t k = 0; k < cls.halfsize; ++k) {
            std::size_t sk = cls.slot_start[k];
            for (std::size_t i = 0; i < w; ++i)
                for (std::size_t j = 0; j < w; ++j) Dg.at(sk + i, sk + j) = Cg.at(s0 + i, s0 + j);
        }
    }
    MatQ Ng = Cg - Dg;
    if (!is_nilpotent(Ng))
        throw invalid_input("InternalError", "residual algebra element must be nilpotent");
    MatQ G1g = detail::exp_nilpotent(Ng);

    // Symplectic part: one Sp(2l) element per size class, repeated along its
    // slot diagonal.
    MatQ G2g(n, n);
    for (const auto& cls : gl.classes) {
        MatQ s = detail::random_symplectic(cls.count, rng);
        std::size_t w = 2 * cls.count;
        for (std::size_t k = 0; k < cls.halfsize; ++k) {
            std::size_t sk = cls.slot_start[k];
            for (std::size_t i = 0; i < w; ++i)
                for (std::size_t j = 0; j < w; ++j) G2g.at(sk + i, sk + j) = s.at(i, j);
        }
    }

    MatQ G = detail::to_ambient(G2g * G1g, gl);
    MatQ Gt = G.transpose();
    if (Gt * p.A * G != p.A || Gt * p.B * G != p.B)
        throw invalid_input("InternalError", "sampled map is not an automorphism");
    return G;
}

// Coordinates on V/L: rows of `projection` give the coordinates of an
// ambient vector modulo L.
inline MatQ quotient_projection(const Subspace& L) {
    std::size_t n = L.ambient();
    MatQ stack = L.basis();
    Subspace comp_span(n, stack);
    MatQ completion = comp_span.annihilator().basis();
    MatQ full = stack.vstack(completion);
    MatQ fi = inverse(full);
    std::size_t q = completion.rows();
    MatQ proj(q, n);
    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < n; ++i) proj.at(j, i) = fi.at(i, L.dim() + j);
    return proj;
}

// Dimension of the Aut-orbit of L: rank of the linearized action
// aut -> Hom(L, V/L), C -> (x -> C x mod L).
inline std::size_t orbit_tangent_dim(const AutAlgebra& a, const Subspace& L) {
    std::size_t n = a.pencil.dim;
    if (L.ambient() != n) throw invalid_input("AmbientMismatch", "subspace of a different space");
    std::size_t q = n - L.dim();
    if (a.basis.empty() || L.dim() == 0 || q == 0) return 0;
    MatQ proj = quotient_projection(L);
    MatQ rows(a.basis.size(), L.dim() * q);
    for (std::size_t b = 0; b < a.basis.size(); ++b) {
        for (std::size_t r = 0; r < L.dim(); ++r) {
            std::vector<Rat> img = a.basis[b].apply(L.basis().row(r));
            std::vector<Rat> co = proj.apply(img);
            for (std::size_t c = 0; c < q; ++c) rows.at(b, r * q + c) = co[c];
        }
    }
    return rank_fraction_free(rows);
}

} // namespace pencil_lab
