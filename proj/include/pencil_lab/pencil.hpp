#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "pencil_lab/invariants.hpp"
#include "pencil_lab/matrix.hpp"
#include "pencil_lab/numtheory.hpp"
#include "pencil_lab/poly.hpp"
#include "pencil_lab/rng.hpp"
#include "pencil_lab/subspace.hpp"

namespace pencil_lab {

// Pencil {A + lambda B} of skew-symmetric bilinear forms on Q^dim.
struct Pencil {
    std::size_t dim = 0;
    MatQ A;
    MatQ B;
};

inline Pencil make_pencil(const MatQ& a, const MatQ& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw invalid_input("SizeMismatch", "pencil generators must be square of equal size");
    if (!a.is_skew_symmetric() || !b.is_skew_symmetric())
        throw invalid_input("NotSkewSymmetric", "pencil generators must be skew-symmetric");
    return Pencil{a.rows(), a, b};
}

// A + lambda B for finite lambda, B for lambda = infinity.
inline MatQ form_at(const Pencil& p, const Eigenvalue& ev) {
    if (ev.is_infinite()) return p.B;
    return p.A + p.B * ev.value();
}

inline MatQ form_at(const Pencil& p, const Rat& lambda) {
    return p.A + p.B * lambda;
}

// ---------------------------------------------------------------------------
// Standard layout and synthesis

struct BlockRef {
    enum class Type { Jordan, Kronecker };
    Type type = Type::Jordan;
    Eigenvalue eigenvalue;             // Jordan only
    std::size_t param = 0;             // half-size n for Jordan, k for Kronecker
    std::vector<std::size_t> e_cols;   // e_1..e_n (Jordan) or e_1..e_k (Kronecker)
    std::vector<std::size_t> f_cols;   // f_1..f_n (Jordan) or f_0..f_k (Kronecker)
};

struct StandardBasis {
    MatQ S;                       // columns are the new basis vectors
    std::vector<BlockRef> layout; // block types and their column indices in S
};

namespace detail {

// Writes one standard block into (A, B) at the given offset and returns the
// block's column bookkeeping.
inline BlockRef emit_jordan_block(MatQ& A, MatQ& B, std::size_t off, const Eigenvalue& ev,
                                  std::size_t n) {
    BlockRef ref;
    ref.type = BlockRef::Type::Jordan;
    ref.eigenvalue = ev;
    ref.param = n;
    for (std::size_t i = 0; i < n; ++i) {
        ref.e_cols.push_back(off + i);
        ref.f_cols.push_back(off + n + i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t e = off + i, f = off + n + i;
        if (ev.is_infinite()) {
            // A(e_i, f_i) = 1; B(e_i, f_{i+1}) = 1.
            A.at(e, f) = Rat(1);
            A.at(f, e) = Rat(-1);
            if (i + 1 < n) {
                B.at(e, f + 1) = Rat(1);
                B.at(f + 1, e) = Rat(-1);
            }
        } else {
            // A(e_i, f_i) = lambda0, A(e_i, f_{i+1}) = 1; B(e_i, f_i) = 1.
            if (ev.value() != 0) {
                A.at(e, f) = ev.value();
                A.at(f, e) = -ev.value();
            }
            if (i + 1 < n) {
                A.at(e, f + 1) = Rat(1);
                A.at(f + 1, e) = Rat(-1);
            }
            B.at(e, f) = Rat(1);
            B.at(f, e) = Rat(-1);
        }
    }
    return ref;
}

inline BlockRef emit_kronecker_block(MatQ& A, MatQ& B, std::size_t off, std::size_t k) {
    BlockRef ref;
    ref.type = BlockRef::Type::Kronecker;
    ref.param = k;
    for (std::size_t i = 0; i < k; ++i) ref.e_cols.push_back(off + i);
    for (std::size_t i = 0; i <= k; ++i) ref.f_cols.push_back(off + k + i);
    // A(e_i, f_{i-1}) = 1, B(e_i, f_i) = 1 in the basis e_1..e_k, f_0..f_k.
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t e = off + i;
        std::size_t f_prev = off + k + i;     // f_{i-1}
        std::size_t f_this = off + k + i + 1; // f_i
        A.at(e, f_prev) = Rat(1);
        A.at(f_prev, e) = Rat(-1);
        B.at(e, f_this) = Rat(1);
        B.at(f_this, e) = Rat(-1);
    }
    return ref;
}

} // namespace detail

// Block-diagonal pencil in the standard layout of the JK theorem, plus the
// per-block column bookkeeping. Blocks appear in the canonical invariant
// order: Jordan sorted by (eigenvalue, half-size descending), then Kronecker
// blocks by size descending.
inline std::pair<Pencil, std::vector<BlockRef>> synthesize_with_layout(JKInvariants inv) {
    inv.canonicalize();
    std::size_t n = inv.dim();
    MatQ A(n, n), B(n, n);
    std::vector<BlockRef> layout;
    std::size_t off = 0;
    for (const auto& j : inv.jordan) {
        layout.push_back(detail::emit_jordan_block(A, B, off, j.eigenvalue, j.halfsize));
        off += 2 * j.halfsize;
    }
    for (std::size_t k : inv.kronecker) {
        layout.push_back(detail::emit_kronecker_block(A, B, off, k));
        off += 2 * k + 1;
    }
    return {Pencil{n, A, B}, layout};
}

inline Pencil synthesize(const JKInvariants& inv) { return synthesize_with_layout(inv).first; }

// ---------------------------------------------------------------------------
// Scrambling (seeded congruence by a random invertible matrix)

// Subspace coordinates after the congruence x_old = S x_new: rows map by
// S^{-T}.
inline Subspace transform_subspace(const MatQ& S, const Subspace& L) {
    MatQ sit = inverse(S).transpose();
    return Subspace(L.ambient(), L.basis() * sit);
}

inline std::pair<Pencil, MatQ> scramble(const Pencil& p, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t n = p.dim;
    MatQ S(n, n);
    if (n > 0) {
        do {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) S.at(i, j) = rng.small_rat(-3, 3);
        } while (!is_invertible(S));
    }
    MatQ St = S.transpose();
    return {Pencil{n, St * p.A * S, St * p.B * S}, S};
}

// ---------------------------------------------------------------------------
// Rank, regular values, core and mantle

inline std::size_t pencil_rank(const Pencil& p) {
    return rank_over_lambda(PolyMat::from_pencil(p.A, p.B));
}

inline bool is_regular_value(const Pencil& p, const Rat& lambda, std::size_t prank) {
    return rank(form_at(p, lambda)) == prank;
}

// First `count` nonnegative integers lambda (skipping rank drops) that give
// regular forms.
inline std::vector<Rat> regular_samples(const Pencil& p, std::size_t count, std::size_t prank) {
    std::vector<Rat> out;
    for (long v = 0; out.size() < count; ++v) {
        Rat lambda(v);
        if (is_regular_value(p, lambda, prank)) out.push_back(lambda);
    }
    return out;
}

// Core K (sum of kernels of regular forms) and mantle M = K^perp.
inline std::pair<Subspace, Subspace> core_mantle(const Pencil& p) {
    std::size_t prank = pencil_rank(p);
    std::size_t n = p.dim;
    if (n == 0) return {Subspace::zero(0), Subspace::zero(0)};
    std::vector<Rat> samples = regular_samples(p, n + 1, prank);
    Subspace core = Subspace::zero(n);
    for (const Rat& s : samples) core = join(core, kernel(form_at(p, s)));
    MatQ mu = form_at(p, samples[0]);
    Subspace mantle = kernel(core.basis() * mu);
    return {core, mantle};
}

// ---------------------------------------------------------------------------
// Quotients by bi-isotropic subspaces with U^perp known (used both by the
// core/mantle reduction inside jk_invariants and by the public bi-Poisson
// reduction).

struct PencilQuotient {
    Pencil quotient;   // forms induced on the span of the section rows
    MatQ section;      // rows: ambient representatives of quotient basis vectors
    MatQ projection;   // dim(quotient) x dim(V); for x in U^perp, coords of x mod U
};

// Quotient of p by U inside W (requires U subset W, both forms vanishing on
// pairs (U, W)). The section rows are the canonical complement of U in W
// obtained by reducing the RREF basis of W modulo U.
inline PencilQuotient quotient_by(const Pencil& p, const Subspace& U, const Subspace& W) {
    std::size_t n = p.dim;
    std::vector<std::vector<Rat>> reps;
    for (std::size_t i = 0; i < W.dim(); ++i) {
        std::vector<Rat> r = U.reduce_mod(W.basis().row(i));
        bool zero = true;
        for (const Rat& x : r) zero = zero && x == 0;
        if (!zero) reps.push_back(r);
    }
    Subspace comp = Subspace::span_of(n, reps);
    MatQ section = comp.basis();
    std::size_t q = section.rows();

    // Coordinates mod U: complete [U; section] to an invertible square matrix
    // and read the middle band of the inverse transpose.
    MatQ stack = U.basis().vstack(section);
    Subspace span_uw(n, stack);
    MatQ completion = span_uw.annihilator().basis(); // complements the span to all of Q^n
    MatQ full = stack.vstack(completion);
    // For a row vector x, its coefficient vector c with x = c * full is
    // c = x * full^{-1}; we want the section coordinates, columns U.dim()..U.dim()+q.
    MatQ fi = inverse(full);
    MatQ proj(q, n);
    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < n; ++i) proj.at(j, i) = fi.at(i, U.dim() + j);

    MatQ Aq(q, q), Bq(q, q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            Aq.at(i, j) = p.A.eval(section.row(i), section.row(j));
            Bq.at(i, j) = p.B.eval(section.row(i), section.row(j));
        }
    return PencilQuotient{Pencil{q, Aq, Bq}, section, proj};
}

// ---------------------------------------------------------------------------
// Jordan contexts and eigenvalue machinery

// A pencil together with a choice of generators A'' = alpha A + beta B,
// B'' = gamma A + delta B such that B'' is nondegenerate, and the recursion
// operator P = B''^{-1} A''. Only valid for Jordan pencils.
struct JordanContext {
    Pencil pencil;    // original generators
    MatQ Ap, Bp;      // chosen generators
    MatQ P;           // recursion operator of (Ap, Bp)
    Rat alpha, beta, gamma, delta;

    std::size_t dim() const { return pencil.dim; }
    bool plain_generators() const {
        return alpha == 1 && beta == 0 && gamma == 0 && delta == 1;
    }
};

// Original pencil eigenvalue corresponding to a P-eigenvalue mu, through the
// generator change (projective Moebius transform).
inline Eigenvalue eigenvalue_from_operator(const JordanContext& ctx, const Eigenvalue& mu) {
    Rat mx = mu.is_infinite() ? Rat(1) : mu.value();
    Rat my = mu.is_infinite() ? Rat(0) : Rat(1);
    Rat x = ctx.delta * mx - ctx.beta * my;
    Rat y = -ctx.gamma * mx + ctx.alpha * my;
    if (y == 0) return Eigenvalue::infinity();
    return Eigenvalue(x / y);
}

inline Eigenvalue operator_eigenvalue_of(const JordanContext& ctx, const Eigenvalue& lambda) {
    Rat x = lambda.is_infinite() ? Rat(1) : lambda.value();
    Rat y = lambda.is_infinite() ? Rat(0) : Rat(1);
    Rat mx = ctx.alpha * x + ctx.beta * y;
    Rat my = ctx.gamma * x + ctx.delta * y;
    if (my == 0) return Eigenvalue::infinity();
    return Eigenvalue(mx / my);
}

// Builds a context for a Jordan pencil (every form regular is not required;
// B'' just has to be nondegenerate, which fails only if the pencil has
// Kronecker blocks).
inline JordanContext make_jordan_context(const Pencil& p) {
    std::size_t n = p.dim;
    auto try_pair = [&](Rat g, Rat d) -> std::optional<JordanContext> {
        MatQ Bp = p.A * g + p.B * d;
        if (!is_invertible(Bp)) return std::nullopt;
        Rat a(1), b(0);
        if (d == 0 && g != 0) { a = 0; b = 1; } // keep generators independent
        MatQ Ap = p.A * a + p.B * b;
        MatQ P = inverse(Bp) * Ap;
        return JordanContext{p, Ap, Bp, P, a, b, g, d};
    };
    if (auto c = try_pair(Rat(0), Rat(1))) return *c; // B itself
    if (auto c = try_pair(Rat(1), Rat(0))) return *c; // A (generator swap)
    for (long v = 1; v <= static_cast<long>(2 * n + 2); ++v)
        if (auto c = try_pair(Rat(1), Rat(v))) return *c;
    throw unsupported("NotJordan", "pencil has a Kronecker part; no nondegenerate generator");
}

inline bool is_nilpotent(const MatQ& m) {
    return mat_pow(m, m.rows()).is_zero();
}

// Monic minimal polynomial via Krylov chains on coordinate vectors.
inline Poly minimal_polynomial(const MatQ& P) {
    std::size_t n = P.rows();
    Poly m(Rat(1));
    for (std::size_t start = 0; start < n; ++start) {
        std::vector<Rat> v(n, Rat(0));
        v[start] = Rat(1);
        // Krylov rows v, Pv, P^2 v, ...
        MatQ rows(0, n);
        std::vector<Rat> cur = v;
        while (true) {
            // Is cur in the row span?
            Subspace sp(n, rows);
            if (sp.contains(cur)) break;
            rows = rows.vstack(MatQ::from_rows({cur}));
            cur = P.apply(cur);
        }
        // cur = sum c_i P^i v with the c_i read off by solving rows^T c = cur.
        std::vector<Rat> c;
        if (!solve_linear(rows.transpose(), cur, c))
            throw invalid_input("InternalError", "Krylov dependency must be solvable");
        std::vector<Rat> coeffs(rows.rows() + 1, Rat(0));
        for (std::size_t i = 0; i < rows.rows(); ++i) coeffs[i] = -c[i];
        coeffs[rows.rows()] = Rat(1);
        m = poly_lcm(m, Poly(std::move(coeffs)));
        if (m.degree() == static_cast<int>(n)) break;
    }
    return m;
}

// Distinct rational eigenvalues of P. Throws NonRationalEigenvalue if the
// generalized eigenspaces of the rational roots do not fill the space.
inline std::vector<Rat> rational_operator_spectrum(const MatQ& P) {
    std::size_t n = P.rows();
    Poly m = minimal_polynomial(P);
    std::vector<Rat> evs;
    std::size_t total = 0;
    for (const auto& [root, mult] : rational_roots(m)) {
        (void)mult;
        MatQ shifted = P - MatQ::identity(n) * root;
        std::size_t g = kernel(mat_pow(shifted, n)).dim();
        if (g > 0) {
            evs.push_back(root);
            total += g;
        }
    }
    if (total != n)
        throw unsupported("NonRationalEigenvalue",
                          "operator spectrum is not rational: minimal polynomial "
                          "has an irreducible factor of degree >= 2");
    return evs;
}

// ---------------------------------------------------------------------------
// Jordan-Kronecker invariants

namespace detail {

// Weyr data of a nilpotent operator: w[j] = dim Ker N^j, j = 0..height.
template <class F>
std::vector<std::size_t> weyr_sequence(const Matrix<F>& N) {
    std::vector<std::size_t> w{0};
    std::size_t n = N.rows();
    Matrix<F> power = Matrix<F>::identity(n);
    while (w.back() < n) {
        power = power * N;
        std::size_t k = kernel(power).dim();
        if (k == w.back())
            throw unsupported("NotNilpotent", "operator is not nilpotent on this space");
        w.push_back(k);
    }
    return w;
}

// Multiset of Jordan block sizes of a nilpotent operator (descending).
template <class F>
std::vector<std::size_t> nilpotent_block_sizes(const Matrix<F>& N) {
    std::vector<std::size_t> w = weyr_sequence(N);
    std::vector<std::size_t> sizes;
    std::size_t height = w.size() - 1;
    for (std::size_t s = height; s >= 1; --s) {
        std::size_t geq_s = w[s] - w[s - 1];
        std::size_t geq_s1 = (s + 1 < w.size()) ? w[s + 1] - w[s] : 0;
        for (std::size_t c = 0; c < geq_s - geq_s1; ++c) sizes.push_back(s);
    }
    return sizes;
}

} // namespace detail

// Jordan half-sizes per eigenvalue for a Jordan context: the operator Jordan
// blocks of P come in pairs, one pair per pencil block.
inline std::vector<std::pair<Eigenvalue, std::vector<std::size_t>>> jordan_structure(
    const JordanContext& ctx) {
    std::size_t n = ctx.dim();
    std::vector<std::pair<Eigenvalue, std::vector<std::size_t>>> out;
    for (const Rat& mu : rational_operator_spectrum(ctx.P)) {
        MatQ shifted = ctx.P - MatQ::identity(n) * mu;
        Subspace gen_eig = kernel(mat_pow(shifted, n));
        // Restrict the shifted operator to the generalized eigenspace.
        MatQ R = gen_eig.basis();
        std::size_t d = R.rows();
        MatQ restr(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<Rat> img = shifted.apply(R.row(i));
            std::vector<Rat> coords;
            if (!solve_linear(R.transpose(), img, coords))
                throw invalid_input("InternalError", "generalized eigenspace is not invariant");
            for (std::size_t j = 0; j < d; ++j) restr.at(j, i) = coords[j];
        }
        std::vector<std::size_t> op_sizes = detail::nilpotent_block_sizes(restr);
        // Pencil blocks contribute operator blocks in pairs.
        std::vector<std::size_t> halfsizes;
        for (std::size_t i = 0; i < op_sizes.size(); i += 2) {
            if (i + 1 >= op_sizes.size() || op_sizes[i] != op_sizes[i + 1])
                throw invalid_input("InternalError",
                                    "operator Jordan blocks of a skew pencil must pair up");
            halfsizes.push_back(op_sizes[i]);
        }
        out.emplace_back(eigenvalue_from_operator(ctx, Eigenvalue(mu)), halfsizes);
    }
    return out;
}

inline JKInvariants jk_invariants(const Pencil& p) {
    JKInvariants inv;
    std::size_t n = p.dim;
    if (n == 0) return inv;
    std::size_t prank = pencil_rank(p);
    std::size_t n_kron = n - prank;

    Subspace core = Subspace::zero(n);
    std::vector<Rat> samples = regular_samples(p, n + 1, prank);
    if (n_kron > 0) {
        // d_m = dim of the span of the first m kernels = sum_i min(m, k_i + 1);
        // the increments recover the Kronecker sizes.
        std::vector<std::size_t> d{0};
        for (const Rat& s : samples) {
            core = join(core, kernel(form_at(p, s)));
            d.push_back(core.dim());
            if (d.size() >= 3 && d.back() == d[d.size() - 2]) break;
        }
        std::vector<std::size_t> incr;
        for (std::size_t m = 1; m < d.size(); ++m) incr.push_back(d[m] - d[m - 1]);
        if (incr.empty() || incr.front() != n_kron || incr.back() != 0)
            throw invalid_input("InternalError", "Kronecker kernel growth did not stabilize");
        // incr[m-1] = #{i : k_i >= m-1}; blocks with k_i = t: incr[t] - incr[t+1].
        for (std::size_t t = 0; t + 1 < incr.size(); ++t)
            for (std::size_t c = 0; c < incr[t] - incr[t + 1]; ++c) inv.kronecker.push_back(t);
    }

    // Jordan part lives on M / K.
    MatQ mu_form = form_at(p, samples[0]);
    Subspace mantle = core.dim() == 0 ? Subspace::full(n) : kernel(core.basis() * mu_form);
    if (mantle.dim() - core.dim() > 0) {
        PencilQuotient q = quotient_by(p, core, mantle);
        JordanContext ctx = make_jordan_context(q.quotient);
        for (auto& [ev, halfsizes] : jordan_structure(ctx))
            for (std::size_t h : halfsizes) inv.jordan.push_back({ev, h});
    }
    inv.canonicalize();
    if (inv.dim() != n)
        throw invalid_input("InternalError", "invariant dimensions do not add up");
    return inv;
}

// ---------------------------------------------------------------------------
// Normalization to nilpotent generators

// For a single-eigenvalue Jordan pencil, returns generators (A - lambda0 B, B)
// (or the swap (B, A) for lambda0 = infinity) whose recursion operator is
// nilpotent.
inline Pencil normalize_to_nilpotent(const Pencil& p, const Eigenvalue& lambda0) {
    JKInvariants inv = jk_invariants(p);
    if (!inv.single_eigenvalue() || inv.jordan.front().eigenvalue != lambda0)
        throw invalid_input("NotSingleEigenvalue",
                            "pencil is not a Jordan pencil with the single eigenvalue " +
                                lambda0.str());
    if (lambda0.is_infinite()) return Pencil{p.dim, p.B, p.A};
    return Pencil{p.dim, p.A - p.B * lambda0.value(), p.B};
}

// Context with plain generators (A, B), B nondegenerate, P = B^{-1}A nilpotent.
inline JordanContext make_nilpotent_context(const Pencil& p) {
    if (!is_invertible(p.B))
        throw invalid_input("NotStandardLayout", "B generator must be nondegenerate");
    MatQ P = inverse(p.B) * p.A;
    if (!is_nilpotent(P))
        throw invalid_input("NotSingleEigenvalue", "recursion operator is not nilpotent");
    return JordanContext{p, p.A, p.B, P, Rat(1), Rat(0), Rat(0), Rat(1)};
}

// ---------------------------------------------------------------------------
// Eigen-decomposition of a Jordan pencil

struct EigenFactor {
    Eigenvalue eigenvalue;  // of the original pencil
    Pencil pencil;          // restriction of the forms to the factor
    MatQ embedding;         // rows are the ambient images of the factor basis
};

inline std::vector<EigenFactor> decompose_by_eigenvalue(const JordanContext& ctx) {
    std::size_t n = ctx.dim();
    std::vector<EigenFactor> out;
    for (const Rat& mu : rational_operator_spectrum(ctx.P)) {
        MatQ shifted = ctx.P - MatQ::identity(n) * mu;
        Subspace g = kernel(mat_pow(shifted, n));
        MatQ R = g.basis();
        MatQ Rt = R.transpose();
        MatQ Af = R * ctx.pencil.A * Rt;
        MatQ Bf = R * ctx.pencil.B * Rt;
        out.push_back(EigenFactor{eigenvalue_from_operator(ctx, Eigenvalue(mu)),
                                  Pencil{R.rows(), Af, Bf}, R});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Standard basis for a nilpotent Jordan context

namespace detail {

template <class F>
std::size_t vector_height(const Matrix<F>& P, std::vector<F> v) {
    std::size_t h = 0;
    auto nonzero = [](const std::vector<F>& x) {
        for (const F& c : x)
            if (!field_traits<F>::is_zero(c)) return true;
        return false;
    };
    while (nonzero(v)) {
        v = P.apply(v);
        ++h;
    }
    return h;
}

} // namespace detail

// Extracts standard bases of maximal Jordan blocks one at a time:
// pick a maximal-height vector v, build the chain e_i = P^{i-1} v, solve
// B(e_i, f_n) = delta_{i n}, chain the f's down, and recurse on the
// B-orthogonal complement.
inline StandardBasis standard_basis_nilpotent(const JordanContext& ctx) {
    if (!ctx.plain_generators())
        throw invalid_input("NotStandardLayout", "context must use plain (A, B) generators");
    if (!is_nilpotent(ctx.P))
        throw invalid_input("NotSingleEigenvalue", "recursion operator must be nilpotent");
    const Eigenvalue ev = eigenvalue_from_operator(ctx, Eigenvalue(Rat(0)));

    std::size_t dim = ctx.dim();
    StandardBasis out;
    out.S = MatQ(dim, dim);

    // Working copies in ambient coordinates.
    MatQ A = ctx.pencil.A, B = ctx.pencil.B, P = ctx.P;
    // Rows of `frame`: ambient coordinates of the current complement's basis.
    MatQ frame = MatQ::identity(dim);

    std::vector<std::vector<std::vector<Rat>>> blocks_e, blocks_f; // ambient vectors

    while (frame.rows() > 0) {
        std::size_t m = frame.rows();
        // Restricted forms and operator on the complement, in frame coords.
        MatQ Ar(m, m), Br(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                Ar.at(i, j) = A.eval(frame.row(i), frame.row(j));
                Br.at(i, j) = B.eval(frame.row(i), frame.row(j));
            }
        MatQ Pr = inverse(Br) * Ar;

        // Height of the restricted operator and a deterministic witness.
        std::size_t height = 0;
        {
            MatQ power = MatQ::identity(m);
            while (!power.is_zero()) {
                power = power * Pr;
                ++height;
            }
        }
        std::size_t nb = height; // half-size of the block being extracted
        MatQ ph = mat_pow(Pr, nb - 1);
        std::size_t witness = m;
        for (std::size_t j = 0; j < m && witness == m; ++j) {
            for (std::size_t i = 0; i < m; ++i)
                if (ph.at(i, j) != 0) {
                    witness = j;
                    break;
                }
        }
        std::vector<Rat> v(m, Rat(0));
        v[witness] = Rat(1);

        // Chain e_1..e_nb in frame coordinates.
        std::vector<std::vector<Rat>> e_chain{v};
        for (std::size_t i = 1; i < nb; ++i) e_chain.push_back(Pr.apply(e_chain.back()));
        // Solve B(e_i, f_nb) = delta_{i, nb}.
        MatQ constraints(nb, m);
        for (std::size_t i = 0; i < nb; ++i) {
            std::vector<Rat> row = e_chain[i];
            std::vector<Rat> br(m, Rat(0));
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < m; ++b) br[b] += row[a] * Br.at(a, b);
            constraints.set_row(i, br);
        }
        std::vector<Rat> rhs(nb, Rat(0));
        rhs[nb - 1] = Rat(1);
        std::vector<Rat> f_top;
        if (!solve_linear(constraints, rhs, f_top))
            throw invalid_input("InternalError", "chain pairing system must be solvable");
        std::vector<std::vector<Rat>> f_chain(nb);
        f_chain[nb - 1] = f_top;
        for (std::size_t i = 1; i < nb; ++i)
            f_chain[nb - 1 - i] = Pr.apply(f_chain[nb - i]);

        // Lift to ambient coordinates.
        auto lift = [&](const std::vector<Rat>& x) {
            std::vector<Rat> amb(dim, Rat(0));
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < dim; ++j) amb[j] += x[i] * frame.at(i, j);
            return amb;
        };
        std::vector<std::vector<Rat>> e_amb, f_amb;
        for (const auto& x : e_chain) e_amb.push_back(lift(x));
        for (const auto& x : f_chain) f_amb.push_back(lift(x));
        blocks_e.push_back(e_amb);
        blocks_f.push_back(f_amb);

        // B-orthogonal complement of the block inside the current frame.
        MatQ block_rows(2 * nb, m);
        for (std::size_t i = 0; i < nb; ++i) block_rows.set_row(i, e_chain[i]);
        for (std::size_t i = 0; i < nb; ++i) block_rows.set_row(nb + i, f_chain[i]);
        MatQ orth_constraints = block_rows * Br; // rows: x maps to block_rows . Br . x
        Subspace comp = kernel(orth_constraints);
        frame = comp.basis() * frame;
    }

    // Assemble: blocks in extraction order already have non-increasing sizes.
    std::size_t off = 0;
    for (std::size_t b = 0; b < blocks_e.size(); ++b) {
        BlockRef ref;
        ref.type = BlockRef::Type::Jordan;
        ref.eigenvalue = ev;
        ref.param = blocks_e[b].size();
        std::size_t nb = ref.param;
        for (std::size_t i = 0; i < nb; ++i) {
            for (std::size_t r = 0; r < dim; ++r) out.S.at(r, off + i) = blocks_e[b][i][r];
            for (std::size_t r = 0; r < dim; ++r) out.S.at(r, off + nb + i) = blocks_f[b][i][r];
            ref.e_cols.push_back(off + i);
            ref.f_cols.push_back(off + nb + i);
        }
        off += 2 * nb;
        out.layout.push_back(ref);
    }
    return out;
}

} // namespace pencil_lab
