#include "test_helpers.hpp"

#include "pencil_lab/aut.hpp"
#include "pencil_lab/orbits.hpp"
#include "pencil_lab/subspace_ops.hpp"

using namespace plt;

namespace {

std::size_t aut_dim_formula(const std::vector<std::size_t>& halfsizes) {
    // sum (4j - 1) n_j over descending half-sizes
    std::size_t s = 0;
    for (std::size_t j = 0; j < halfsizes.size(); ++j) s += (4 * (j + 1) - 1) * halfsizes[j];
    return s;
}

} // namespace

TEST_CASE("automorphism algebra dimensions") {
    CHECK(aut_algebra(synthesize(inv_of("J0:1"))).dim() == 3);
    CHECK(aut_algebra(synthesize(inv_of("J0:3,J0:1"))).dim() == 16);
    CHECK(aut_algebra(synthesize(inv_of("J0:2,J0:2"))).dim() == 20);
    SECTION("matches the closed formula for every tuple with sum <= 5") {
        std::vector<std::vector<std::size_t>> tuples;
        for (std::size_t total = 1; total <= 5; ++total) {
            std::vector<std::size_t> part;
            auto rec = [&](auto&& self, std::size_t rest, std::size_t maxv) -> void {
                if (rest == 0) {
                    tuples.push_back(part);
                    return;
                }
                for (std::size_t v = std::min(rest, maxv); v >= 1; --v) {
                    part.push_back(v);
                    self(self, rest - v, v);
                    part.pop_back();
                }
            };
            rec(rec, total, total);
        }
        for (const auto& t : tuples) {
            JKInvariants inv;
            for (std::size_t n : t) inv.jordan.push_back({Eigenvalue(Rat(0)), n});
            inv.canonicalize();
            CAPTURE(inv.str());
            CHECK(aut_algebra(synthesize(inv)).dim() == aut_dim_formula(t));
        }
    }
    SECTION("every basis element satisfies both derivation identities") {
        Pencil p = synthesize(inv_of("J0:2,J0:1;K:1"));
        AutAlgebra a = aut_algebra(p);
        for (const MatQ& c : a.basis) {
            CHECK((c.transpose() * p.A + p.A * c).is_zero());
            CHECK((c.transpose() * p.B + p.B * c).is_zero());
        }
    }
    SECTION("eigenvalue-shifted pencils have the same algebra dimension") {
        CHECK(aut_algebra(synthesize(inv_of("J2:3,J2:1"))).dim() == 16);
    }
}

TEST_CASE("random automorphisms") {
    SECTION("exact congruence identities, determinism, invertibility") {
        for (const char* spec : {"J0:1", "J0:3,J0:1", "J0:2,J0:2", "J0:2,J0:1,J0:1"}) {
            Pencil p = synthesize(inv_of(spec));
            AutAlgebra a = aut_algebra(p);
            MatQ g1 = random_automorphism(a, 5);
            MatQ g2 = random_automorphism(a, 5);
            CHECK(g1 == g2);
            MatQ g3 = random_automorphism(a, 6);
            CHECK(g1 != g3);
            CHECK(is_invertible(g1));
            CHECK(g1.transpose() * p.A * g1 == p.A);
            CHECK(g1.transpose() * p.B * g1 == p.B);
        }
    }
    SECTION("multi-eigenvalue standard pencils are supported") {
        Pencil p = synthesize(inv_of("J0:2,J1:1"));
        AutAlgebra a = aut_algebra(p);
        MatQ g = random_automorphism(a, 3);
        CHECK(g.transpose() * p.A * g == p.A);
        CHECK(g.transpose() * p.B * g == p.B);
    }
    SECTION("non-standard layouts are rejected") {
        auto [p, s] = scramble(synthesize(inv_of("J0:2")), 1);
        AutAlgebra a = aut_algebra(p);
        CHECK_THROWS_MATCHES(random_automorphism(a, 0), Error,
                             Catch::Matchers::Predicate<Error>(
                                 [](const Error& e) { return e.kind() == "NotStandardLayout"; }));
    }
    SECTION("the generic orbit is preserved") {
        Pencil p = synthesize(inv_of("J0:3,J0:1"));
        JordanContext ctx = make_nilpotent_context(p);
        AutAlgebra a = aut_algebra(p);
        Subspace L = span_units(8, {0, 1, 2, 6}); // e-span
        for (std::uint64_t s = 0; s < 6; ++s) {
            MatQ g = random_automorphism(a, s);
            Subspace gl(8, L.basis() * g.transpose());
            CHECK(is_generic(ctx, gl));
        }
    }
}

TEST_CASE("orbit tangent dimensions in J_{0,6} + J_{0,2}") {
    Pencil p = synthesize(inv_of("J0:3,J0:1"));
    AutAlgebra a = aut_algebra(p);
    SECTION("generic orbit has dimension 5") {
        Subspace L = span_units(8, {0, 1, 2, 6});
        CHECK(orbit_tangent_dim(a, L) == 5);
    }
    SECTION("the indecomposable example has dimension 3") {
        Subspace L = span(8, {{0, 0, 1, 0, 0, 0, 0, 0},
                              {0, 0, 0, 1, 0, 0, 0, 0},
                              {0, 1, 0, 0, 0, 0, 1, 0},
                              {0, 0, 0, 0, 1, 0, 0, -1}});
        CHECK(orbit_tangent_dim(a, L) == 3);
    }
    SECTION("the non-generic semisimple orbit has dimension 2") {
        Subspace L = span_units(8, {1, 2, 3, 6}); // e_2, e_3, f_1; ehat_1
        CHECK(orbit_tangent_dim(a, L) == 2);
    }
    SECTION("tangent dimension is an orbit invariant") {
        Subspace L = span_units(8, {1, 2, 3, 6});
        for (std::uint64_t s = 0; s < 5; ++s) {
            MatQ g = random_automorphism(a, s);
            Subspace gl(8, L.basis() * g.transpose());
            CHECK(orbit_tangent_dim(a, gl) == 2);
        }
    }
}

TEST_CASE("pushforward of automorphisms through reductions") {
    SECTION("zero maps to zero; images live in the quotient algebra") {
        Pencil p = synthesize(inv_of("J0:3"));
        JordanContext ctx = make_nilpotent_context(p);
        AutAlgebra a = aut_algebra(p);
        Reduction red = reduce(p, kernel(ctx.P));
        AutAlgebra qa = aut_algebra(red.quotient);
        CHECK(push_aut(a, red, MatQ(p.dim, p.dim)).is_zero());
        for (const MatQ& c : a.basis) {
            MatQ img = push_aut(a, red, c);
            CHECK((img.transpose() * red.quotient.A + red.quotient.A * img).is_zero());
            CHECK((img.transpose() * red.quotient.B + red.quotient.B * img).is_zero());
        }
        (void)qa;
    }
    SECTION("equal heights: pushforwards span the full quotient algebra") {
        Pencil p = synthesize(inv_of("J0:3,J0:3"));
        JordanContext ctx = make_nilpotent_context(p);
        AutAlgebra a = aut_algebra(p);
        Reduction red = reduce(p, kernel(ctx.P));
        AutAlgebra qa = aut_algebra(red.quotient);
        std::size_t q = red.quotient.dim;
        MatQ images(a.basis.size(), q * q);
        for (std::size_t b = 0; b < a.basis.size(); ++b) {
            MatQ img = push_aut(a, red, a.basis[b]);
            for (std::size_t i = 0; i < q; ++i)
                for (std::size_t j = 0; j < q; ++j) images.at(b, i * q + j) = img.at(i, j);
        }
        CHECK(rank(images) == qa.dim());
    }
    SECTION("unequal heights: the image is a proper subalgebra") {
        Pencil p = synthesize(inv_of("J0:3,J0:1"));
        JordanContext ctx = make_nilpotent_context(p);
        AutAlgebra a = aut_algebra(p);
        // U = J1-part of Ker P: heights (1, 0); quotient is J_{0,2} + J_{0,2}.
        NilpotentSpace<Rat> ns = nilpotent_space_of(ctx);
        Subspace u = invariant_subspace_of(ns, {1, 0});
        Reduction red = reduce(p, u);
        AutAlgebra qa = aut_algebra(red.quotient);
        std::size_t q = red.quotient.dim;
        MatQ images(a.basis.size(), q * q);
        for (std::size_t b = 0; b < a.basis.size(); ++b) {
            MatQ img = push_aut(a, red, a.basis[b]);
            for (std::size_t i = 0; i < q; ++i)
                for (std::size_t j = 0; j < q; ++j) images.at(b, i * q + j) = img.at(i, j);
        }
        CHECK(jk_invariants(red.quotient) == inv_of("J0:1,J0:1"));
        CHECK(rank(images) < qa.dim());
        CHECK(rank(images) == 6);
        CHECK(qa.dim() == 10);
    }
    SECTION("maps that do not preserve U are rejected") {
        Pencil p = synthesize(inv_of("J0:2"));
        AutAlgebra a = aut_algebra(p);
        // U = span{e_2}: P-invariant (so reducible) but not Aut-invariant, so
        // some algebra element moves it.
        Reduction red = reduce(p, span_units(4, {1}));
        bool found = false;
        for (const MatQ& c : a.basis) {
            if (red.U.is_invariant_under(c)) continue;
            CHECK_THROWS_MATCHES(push_aut(a, red, c), Error,
                                 Catch::Matchers::Predicate<Error>([](const Error& e) {
                                     return e.kind() == "NotInvariantU";
                                 }));
            found = true;
            break;
        }
        CHECK(found);
    }
}
