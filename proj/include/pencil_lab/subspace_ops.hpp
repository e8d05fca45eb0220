#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pencil_lab/aut.hpp"
#include "pencil_lab/pencil.hpp"

namespace pencil_lab {

struct SubspaceReport {
    bool isotropic_A = false;
    bool isotropic_B = false;
    bool bi_isotropic = false;
    bool admissible = false;
    bool bi_lagrangian = false;
    std::size_t dim = 0;
    std::size_t target_dim = 0; // dim V - rk P / 2
};

namespace detail {

inline bool form_vanishes_on(const MatQ& form, const Subspace& S) {
    return (S.basis() * form * S.basis().transpose()).is_zero();
}

// Image A_lambda(S) as a subspace of the dual (row span of S * A_lambda).
inline Subspace form_image(const Pencil& p, const Subspace& S, const Rat& lambda) {
    return Subspace(p.dim, S.basis() * form_at(p, lambda));
}

// Exact admissibility: images of S under the pencil forms coincide for almost
// all lambda iff two of dim V + 2 regular samples give the same image (for a
// fixed candidate image W the containment A_lambda(S) <= W is linear in
// lambda, and the bad set has at most dim S points).
inline bool admissible_by_sampling(const Pencil& p, const Subspace& S, std::size_t prank) {
    std::vector<Rat> samples = regular_samples(p, p.dim + 2, prank);
    std::vector<Subspace> images;
    for (const Rat& s : samples) images.push_back(form_image(p, S, s));
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j)
            if (images[i] == images[j]) return true;
    return false;
}

inline bool pencil_is_jordan(const Pencil& p, std::size_t prank) { return prank == p.dim; }

} // namespace detail

inline SubspaceReport classify_subspace(const Pencil& p, const Subspace& S) {
    if (S.ambient() != p.dim)
        throw invalid_input("AmbientMismatch", "subspace ambient does not match the pencil");
    SubspaceReport rep;
    rep.dim = S.dim();
    std::size_t prank = pencil_rank(p);
    rep.target_dim = p.dim - prank / 2;
    rep.isotropic_A = detail::form_vanishes_on(p.A, S);
    rep.isotropic_B = detail::form_vanishes_on(p.B, S);
    rep.bi_isotropic = rep.isotropic_A && rep.isotropic_B;
    if (detail::pencil_is_jordan(p, prank)) {
        JordanContext ctx = make_jordan_context(p);
        rep.admissible = S.is_invariant_under(ctx.P);
    } else {
        rep.admissible = detail::admissible_by_sampling(p, S, prank);
    }
    rep.bi_lagrangian = rep.bi_isotropic && rep.admissible && rep.dim == rep.target_dim;
    return rep;
}

// Skew-orthogonal complement w.r.t. one form value.
inline Subspace form_perp(const Pencil& p, const Subspace& S, const Rat& lambda) {
    return kernel(S.basis() * form_at(p, lambda));
}

// U^perp w.r.t. the pencil; requires U admissible, and cross-checks that the
// complement agrees at three regular samples.
inline Subspace pencil_perp(const Pencil& p, const Subspace& S) {
    if (S.ambient() != p.dim)
        throw invalid_input("AmbientMismatch", "subspace ambient does not match the pencil");
    std::size_t prank = pencil_rank(p);
    bool admissible;
    if (detail::pencil_is_jordan(p, prank)) {
        admissible = S.is_invariant_under(make_jordan_context(p).P);
    } else {
        admissible = detail::admissible_by_sampling(p, S, prank);
    }
    if (!admissible)
        throw invalid_input("NotAdmissible", "pencil-perp of a non-admissible subspace");
    std::vector<Rat> samples = regular_samples(p, p.dim + 2, prank);
    // Pick the sample class that realizes the common image: two equal images
    // identify it (for Jordan pencils every regular sample works).
    std::vector<Subspace> perps;
    for (const Rat& s : samples) perps.push_back(form_perp(p, S, s));
    for (std::size_t i = 0; i < perps.size(); ++i) {
        std::size_t agree = 0;
        for (std::size_t j = 0; j < perps.size(); ++j) agree += perps[i] == perps[j] ? 1 : 0;
        if (agree >= 3) return perps[i];
    }
    // dim V + 2 samples with at most dim S bad points always leave >= 3 in
    // agreement for an admissible subspace
    throw invalid_input("InternalError", "no stable pencil-perp among regular samples");
}

// ---------------------------------------------------------------------------
// Bi-Poisson reduction

struct Reduction {
    Subspace U;
    Subspace Uperp;
    Pencil quotient;  // induced pencil on U^perp / U
    MatQ section;     // rows: ambient representatives of the quotient basis
    MatQ projection;  // quotient coordinates of ambient vectors in U^perp
};

inline Reduction reduce(const Pencil& p, const Subspace& U) {
    if (U.ambient() != p.dim)
        throw invalid_input("AmbientMismatch", "subspace ambient does not match the pencil");
    if (!detail::form_vanishes_on(p.A, U) || !detail::form_vanishes_on(p.B, U))
        throw invalid_input("NotBiIsotropic", "reduction requires a bi-isotropic subspace");
    Subspace uperp = pencil_perp(p, U); // throws NotAdmissible if not admissible
    PencilQuotient q = quotient_by(p, U, uperp);
    if (!q.quotient.A.is_skew_symmetric() || !q.quotient.B.is_skew_symmetric())
        throw invalid_input("InternalError", "quotient forms must be skew-symmetric");
    return Reduction{U, uperp, q.quotient, q.section, q.projection};
}

// L' = ((L meet U^perp) + U) / U in quotient coordinates.
inline Subspace push_subspace(const Reduction& r, const Subspace& L) {
    if (L.ambient() != r.U.ambient())
        throw invalid_input("AmbientMismatch", "subspace ambient does not match the reduction");
    Subspace inter = meet(L, r.Uperp);
    Subspace sum = join(inter, r.U);
    return Subspace(r.quotient.dim, sum.basis() * r.projection.transpose());
}

// Induced quotient map of an algebra element; requires C U <= U.
inline MatQ push_aut(const AutAlgebra& a, const Reduction& r, const MatQ& C) {
    std::vector<Rat> coeffs;
    {
        // Membership in span(a.basis): solve the flattened linear system.
        std::size_t n = a.pencil.dim;
        MatQ cols(n * n, a.basis.size());
        for (std::size_t b = 0; b < a.basis.size(); ++b)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) cols.at(i * n + j, b) = a.basis[b].at(i, j);
        std::vector<Rat> target(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) target[i * n + j] = C.at(i, j);
        if (!solve_linear(cols, target, coeffs))
            throw invalid_input("NotInAlgebra", "map is not in the automorphism algebra");
    }
    if (!r.U.is_invariant_under(C))
        throw invalid_input("NotInvariantU", "map does not preserve the reduced subspace");
    std::size_t q = r.quotient.dim;
    MatQ out(q, q);
    for (std::size_t i = 0; i < q; ++i) {
        std::vector<Rat> img = C.apply(r.section.row(i));
        std::vector<Rat> co = r.projection.apply(img);
        for (std::size_t j = 0; j < q; ++j) out.at(j, i) = co[j];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Extension of bi-isotropic subspaces to bi-Lagrangian ones

class NotExtendableError : public Error {
public:
    NotExtendableError(std::string reason, std::vector<std::vector<Rat>> witness)
        : Error(ErrorClass::CheckFailed, "NotExtendable", reason), witness_(std::move(witness)) {}
    const std::vector<std::vector<Rat>>& witness() const { return witness_; }

private:
    std::vector<std::vector<Rat>> witness_;
};

namespace detail {

// Canonical bi-Lagrangian subspace of a Jordan pencil: the sum of the
// e-vector spans of per-eigenvalue standard bases.
inline Subspace canonical_bilagrangian_jordan(const Pencil& p) {
    std::size_t n = p.dim;
    std::vector<std::vector<Rat>> rows;
    JordanContext ctx = make_jordan_context(p);
    for (const EigenFactor& f : decompose_by_eigenvalue(ctx)) {
        Pencil nil = normalize_to_nilpotent(f.pencil, f.eigenvalue);
        StandardBasis sb = standard_basis_nilpotent(make_nilpotent_context(nil));
        for (const BlockRef& blk : sb.layout)
            for (std::size_t col : blk.e_cols) {
                // Column of S -> factor coordinates -> ambient coordinates.
                std::vector<Rat> fac(f.pencil.dim);
                for (std::size_t i = 0; i < f.pencil.dim; ++i) fac[i] = sb.S.at(i, col);
                std::vector<Rat> amb(n, Rat(0));
                for (std::size_t i = 0; i < f.pencil.dim; ++i)
                    for (std::size_t j = 0; j < n; ++j) amb[j] += fac[i] * f.embedding.at(i, j);
                rows.push_back(amb);
            }
    }
    return Subspace::span_of(n, rows);
}

} // namespace detail

// Extends U to a bi-Lagrangian subspace when possible. The criterion: U must
// lie in the mantle and the P-invariant subspace generated by (U + K)/K in
// M/K must be bi-isotropic; otherwise a concrete witness is attached.
inline Subspace extend_to_bilagrangian(const Pencil& p, const Subspace& U) {
    if (U.ambient() != p.dim)
        throw invalid_input("AmbientMismatch", "subspace ambient does not match the pencil");
    std::size_t n = p.dim;
    auto [core, mantle] = core_mantle(p);

    for (std::size_t i = 0; i < U.dim(); ++i)
        if (!mantle.contains(U.basis().row(i)))
            throw NotExtendableError("subspace is not contained in the mantle",
                                     {U.basis().row(i)});

    // Quotient M/K and the invariant closure of the image of U.
    PencilQuotient q = quotient_by(p, core, mantle);
    Subspace ubar(q.quotient.dim, U.basis() * q.projection.transpose());
    Subspace closure = ubar;
    if (q.quotient.dim > 0) {
        JordanContext ctx = make_jordan_context(q.quotient);
        while (true) {
            Subspace next = join(closure, closure.image_under(ctx.P));
            if (next.dim() == closure.dim()) break;
            closure = next;
        }
    }
    // Bi-isotropy of the closure, with a lifted witness pair on failure.
    for (const MatQ* form : {&q.quotient.A, &q.quotient.B}) {
        for (std::size_t i = 0; i < closure.dim(); ++i)
            for (std::size_t j = i; j < closure.dim(); ++j) {
                if (form->eval(closure.basis().row(i), closure.basis().row(j)) == 0) continue;
                auto lift = [&](std::size_t r) {
                    std::vector<Rat> amb(n, Rat(0));
                    for (std::size_t c = 0; c < q.quotient.dim; ++c)
                        for (std::size_t k = 0; k < n; ++k)
                            amb[k] += closure.basis().at(r, c) * q.section.at(c, k);
                    return amb;
                };
                throw NotExtendableError(
                    "invariant closure of the subspace pairs nontrivially with itself",
                    {lift(i), lift(j)});
            }
    }

    // The closure is admissible and bi-isotropic: reduce and take a canonical
    // bi-Lagrangian upstairs of it.
    Subspace lq = Subspace::zero(q.quotient.dim);
    if (q.quotient.dim > 0) {
        Reduction red = reduce(q.quotient, closure);
        Subspace l2 = red.quotient.dim == 0
                          ? Subspace::zero(0)
                          : detail::canonical_bilagrangian_jordan(red.quotient);
        // Pull back: span of closure and the section images of l2.
        lq = closure;
        if (l2.dim() > 0) lq = join(lq, Subspace(q.quotient.dim, l2.basis() * red.section));
    }
    // Pull back to the ambient space: K plus section images.
    Subspace result = core;
    if (lq.dim() > 0) result = join(result, Subspace(n, lq.basis() * q.section));

    SubspaceReport rep = classify_subspace(p, result);
    if (!rep.bi_lagrangian || !result.contains(U))
        throw invalid_input("InternalError", "extension construction failed its contract");
    return result;
}

// ---------------------------------------------------------------------------
// Seeded sampling of bi-Lagrangian subspaces

// Core plus, per eigenvalue factor, a canonical one-block-per-block subspace
// of seeded heights conjugated by a seeded automorphism of the standard
// model. Kronecker-only pencils always yield the core.
inline Subspace random_bilagrangian(const Pencil& p, std::uint64_t seed) {
    std::size_t n = p.dim;
    Rng rng(seed);
    auto [core, mantle] = core_mantle(p);
    if (mantle.dim() == core.dim()) return core; // Kronecker pencil: the core is it
    PencilQuotient q = quotient_by(p, core, mantle);
    JordanContext ctx = make_jordan_context(q.quotient);

    Subspace lq = Subspace::zero(q.quotient.dim);
    for (const EigenFactor& f : decompose_by_eigenvalue(ctx)) {
        Pencil nil = normalize_to_nilpotent(f.pencil, f.eigenvalue);
        StandardBasis sb = standard_basis_nilpotent(make_nilpotent_context(nil));
        // Model pencil in standard layout, with the same block sizes.
        JKInvariants model_inv;
        for (const BlockRef& blk : sb.layout)
            model_inv.jordan.push_back({Eigenvalue(Rat(0)), blk.param});
        model_inv.canonicalize();
        auto [model, model_layout] = synthesize_with_layout(model_inv);
        // Canonical subspace of seeded heights in the model.
        std::vector<std::vector<Rat>> rows;
        for (const BlockRef& blk : model_layout) {
            std::size_t nb = blk.param;
            std::size_t h = (nb + 1) / 2 + rng.below(nb - (nb + 1) / 2 + 1);
            for (std::size_t i = nb - h; i < nb; ++i) {
                std::vector<Rat> r(model.dim, Rat(0));
                r[blk.e_cols[i]] = Rat(1);
                rows.push_back(r);
            }
            for (std::size_t i = 0; i < nb - h; ++i) {
                std::vector<Rat> r(model.dim, Rat(0));
                r[blk.f_cols[i]] = Rat(1);
                rows.push_back(r);
            }
        }
        Subspace lmodel = Subspace::span_of(model.dim, rows);
        MatQ g = random_automorphism(aut_algebra(model), rng.next());
        Subspace lrand(model.dim, lmodel.basis() * g.transpose());
        // Model coordinates -> factor coordinates (x_factor = S x_model) ->
        // quotient coordinates through the embedding rows.
        MatQ to_factor = lrand.basis() * sb.S.transpose();
        Subspace lfactor(f.pencil.dim, to_factor);
        lq = join(lq, Subspace(q.quotient.dim, lfactor.basis() * f.embedding));
    }
    Subspace result = core;
    if (lq.dim() > 0) result = join(result, Subspace(n, lq.basis() * q.section));
    SubspaceReport rep = classify_subspace(p, result);
    if (!rep.bi_lagrangian)
        throw invalid_input("InternalError", "sampled subspace is not bi-Lagrangian");
    return result;
}

// ---------------------------------------------------------------------------
// Complementary bi-Lagrangian subspaces

// For a generic L: a bi-Lagrangian L' with V = L + L' (direct). Exists iff L
// is generic; non-generic inputs raise NotGeneric.
inline Subspace complementary(const JordanContext& ctx, const Subspace& L) {
    if (!ctx.plain_generators() || !is_nilpotent(ctx.P))
        throw invalid_input("NotStandardLayout", "context must be nilpotent with plain generators");
    std::size_t dim = ctx.dim();
    {
        SubspaceReport rep = classify_subspace(ctx.pencil, L);
        if (!rep.bi_lagrangian)
            throw invalid_input("NotBiLagrangian", "complement requires a bi-Lagrangian subspace");
    }
    MatQ frame = MatQ::identity(dim);
    std::vector<std::vector<Rat>> f_rows; // ambient complement vectors
    Subspace lcur = L;

    while (frame.rows() > 0) {
        std::size_t m = frame.rows();
        MatQ Ar(m, m), Br(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                Ar.at(i, j) = ctx.pencil.A.eval(frame.row(i), frame.row(j));
                Br.at(i, j) = ctx.pencil.B.eval(frame.row(i), frame.row(j));
            }
        MatQ Pr = inverse(Br) * Ar;
        std::size_t height = 0;
        {
            MatQ power = MatQ::identity(m);
            while (!power.is_zero()) {
                power = power * Pr;
                ++height;
            }
        }
        // L expressed in frame coordinates.
        Subspace l_in_span = meet(lcur, Subspace(dim, frame));
        std::vector<std::vector<Rat>> coords;
        for (std::size_t i = 0; i < l_in_span.dim(); ++i) {
            std::vector<Rat> c;
            if (!solve_linear(frame.transpose(), l_in_span.basis().row(i), c))
                throw invalid_input("InternalError", "restriction must lie in the frame span");
            coords.push_back(c);
        }
        Subspace lf = Subspace::span_of(m, coords);
        // A maximal-height vector of L in this frame; genericity demands one
        // of full operator height.
        std::size_t pick = lf.dim();
        for (std::size_t i = 0; i < lf.dim(); ++i)
            if (detail::vector_height(Pr, lf.basis().row(i)) == height) {
                pick = i;
                break;
            }
        if (pick == lf.dim())
            throw Error(ErrorClass::CheckFailed, "NotGeneric",
                        "subspace has no vector of full height in a reduction stage");
        std::vector<std::vector<Rat>> e_chain{lf.basis().row(pick)};
        for (std::size_t i = 1; i < height; ++i) e_chain.push_back(Pr.apply(e_chain.back()));
        MatQ constraints(height, m);
        for (std::size_t i = 0; i < height; ++i) {
            std::vector<Rat> br(m, Rat(0));
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < m; ++b) br[b] += e_chain[i][a] * Br.at(a, b);
            constraints.set_row(i, br);
        }
        std::vector<Rat> rhs(height, Rat(0));
        rhs[height - 1] = Rat(1);
        std::vector<Rat> f_top;
        if (!solve_linear(constraints, rhs, f_top))
            throw invalid_input("InternalError", "chain pairing system must be solvable");
        std::vector<std::vector<Rat>> f_chain(height);
        f_chain[height - 1] = f_top;
        for (std::size_t i = 1; i < height; ++i)
            f_chain[height - 1 - i] = Pr.apply(f_chain[height - i]);
        auto lift = [&](const std::vector<Rat>& x) {
            std::vector<Rat> amb(dim, Rat(0));
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < dim; ++j) amb[j] += x[i] * frame.at(i, j);
            return amb;
        };
        for (const auto& fc : f_chain) f_rows.push_back(lift(fc));
        // Remove the extracted block from the frame.
        MatQ block_rows(2 * height, m);
        for (std::size_t i = 0; i < height; ++i) block_rows.set_row(i, e_chain[i]);
        for (std::size_t i = 0; i < height; ++i) block_rows.set_row(height + i, f_chain[i]);
        Subspace comp = kernel(block_rows * Br);
        frame = comp.basis() * frame;
    }
    Subspace result = Subspace::span_of(dim, f_rows);
    if (meet(result, L).dim() != 0 || join(result, L).dim() != dim)
        throw invalid_input("InternalError", "complement construction failed its contract");
    return result;
}

} // namespace pencil_lab
