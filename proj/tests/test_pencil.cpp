#include "test_helpers.hpp"

using namespace plt;

TEST_CASE("pencil construction validates") {
    MatQ zeros(2, 2);
    MatQ b = mat({{0, 1}, {-1, 0}});
    Pencil p = make_pencil(zeros, b);
    CHECK(p.dim == 2);
    CHECK_THROWS_AS(make_pencil(mat({{0, 1}, {1, 0}}), b), Error);
    CHECK_THROWS_AS(make_pencil(MatQ(2, 3), MatQ(2, 3)), Error);
    CHECK_THROWS_AS(make_pencil(MatQ(2, 2), MatQ(3, 3)), Error);
}

TEST_CASE("synthesize standard blocks") {
    SECTION("nilpotent 2x2 Jordan block") {
        Pencil p = synthesize(inv_of("J0:1"));
        CHECK(p.A == MatQ(2, 2));
        CHECK(p.B == mat({{0, 1}, {-1, 0}}));
    }
    SECTION("eigenvalue-2 Jordan block") {
        Pencil p = synthesize(inv_of("J2:1"));
        CHECK(p.A == mat({{0, 2}, {-2, 0}}));
        CHECK(p.B == mat({{0, 1}, {-1, 0}}));
    }
    SECTION("K_3 Kronecker block") {
        Pencil p = synthesize(inv_of("K:1"));
        REQUIRE(p.dim == 3);
        // Basis e_1, f_0, f_1: A(e_1, f_0) = 1, B(e_1, f_1) = 1.
        CHECK(p.A == mat({{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}));
        CHECK(p.B == mat({{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}}));
    }
    SECTION("infinite eigenvalue swaps the roles") {
        Pencil p = synthesize(inv_of("Jinf:2"));
        Pencil q = synthesize(inv_of("J0:2"));
        CHECK(p.A == q.B);
        CHECK(p.B == q.A);
    }
}

TEST_CASE("pencil rank") {
    CHECK(pencil_rank(synthesize(inv_of("J0:1"))) == 2);
    CHECK(pencil_rank(synthesize(inv_of("K:1"))) == 2);
    CHECK(pencil_rank(synthesize(inv_of("K:0"))) == 0);
    CHECK(pencil_rank(synthesize(inv_of("J0:2,J1:1;K:1,K:0"))) == 8);
}

TEST_CASE("scramble is deterministic and congruence-invariant") {
    Pencil p = synthesize(inv_of("J0:2;K:1"));
    auto [s1, m1] = scramble(p, 42);
    auto [s2, m2] = scramble(p, 42);
    CHECK(m1 == m2);
    CHECK(s1.A == s2.A);
    auto [s3, m3] = scramble(p, 43);
    CHECK(m3 != m1);
    CHECK(pencil_rank(s1) == pencil_rank(p));
    CHECK(s1.A == m1.transpose() * p.A * m1);
    CHECK(s1.A.is_skew_symmetric());
}

TEST_CASE("core and mantle") {
    SECTION("K_3: core is the f-span and equals the mantle") {
        Pencil p = synthesize(inv_of("K:1"));
        auto [core, mantle] = core_mantle(p);
        CHECK(core == span_units(3, {1, 2}));
        CHECK(mantle == core);
    }
    SECTION("J_{0,4}: trivial core, full mantle") {
        Pencil p = synthesize(inv_of("J0:2"));
        auto [core, mantle] = core_mantle(p);
        CHECK(core.dim() == 0);
        CHECK(mantle == Subspace::full(4));
    }
    SECTION("J_{0,2} + K_1 against a direct kernel-sum oracle") {
        Pencil p = synthesize(inv_of("J0:1;K:0"));
        auto [core, mantle] = core_mantle(p);
        Subspace oracle = Subspace::zero(3);
        for (long v : {1, 2, 3, 4}) oracle = join(oracle, kernel(form_at(p, Rat(v))));
        CHECK(core == oracle);
        CHECK(core.dim() == 1);
        CHECK(mantle == Subspace::full(3));
    }
    SECTION("core is bi-isotropic and inside the mantle") {
        Pencil p = synthesize(inv_of("J0:2,J1:1;K:1,K:2"));
        auto [core, mantle] = core_mantle(p);
        CHECK((core.basis() * p.A * core.basis().transpose()).is_zero());
        CHECK((core.basis() * p.B * core.basis().transpose()).is_zero());
        CHECK(mantle.contains(core));
    }
}

TEST_CASE("jk invariants round trips") {
    SECTION("named example: J0:2 + K:1 scrambled with seed 7") {
        JKInvariants inv = inv_of("J0:2;K:1");
        auto [sp, s] = scramble(synthesize(inv), 7);
        CHECK(jk_invariants(sp) == inv);
    }
    SECTION("eigenvalue-2 block") {
        CHECK(jk_invariants(synthesize(inv_of("J2:1"))) == inv_of("J2:1"));
    }
    SECTION("rational non-integer eigenvalue") {
        JKInvariants inv;
        inv.jordan.push_back({Eigenvalue(Rat(1, 2)), 2});
        inv.canonicalize();
        auto [sp, s] = scramble(synthesize(inv), 3);
        CHECK(jk_invariants(sp) == inv);
    }
    SECTION("mixed bag with infinity") {
        JKInvariants inv = inv_of("J0:2,J0:1,J-2:1,Jinf:2;K:2,K:0");
        auto [sp, s] = scramble(synthesize(inv), 99);
        CHECK(jk_invariants(sp) == inv);
    }
    SECTION("irrational operator spectrum is rejected") {
        // A = [[0, M], [-M^T, 0]] with a rotation M gives P eigenvalues +-i.
        MatQ a = mat({{0, 0, 0, -1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {1, 0, 0, 0}});
        MatQ b = mat({{0, 0, 1, 0}, {0, 0, 0, 1}, {-1, 0, 0, 0}, {0, -1, 0, 0}});
        Pencil p = make_pencil(a, b);
        CHECK_THROWS_MATCHES(jk_invariants(p), Error, Catch::Matchers::Predicate<Error>(
            [](const Error& e) { return e.kind() == "NonRationalEigenvalue"; }));
    }
}

TEST_CASE("normalize to nilpotent generators") {
    SECTION("finite eigenvalue") {
        Pencil p = synthesize(inv_of("J2:1"));
        Pencil n = normalize_to_nilpotent(p, Eigenvalue(Rat(2)));
        CHECK(n.A == MatQ(2, 2));
        CHECK(n.B == p.B);
    }
    SECTION("infinite eigenvalue swaps generators") {
        Pencil p = synthesize(inv_of("Jinf:2"));
        Pencil n = normalize_to_nilpotent(p, Eigenvalue::infinity());
        Pencil expect = synthesize(inv_of("J0:2"));
        CHECK(n.A == expect.A);
        CHECK(n.B == expect.B);
    }
    SECTION("already nilpotent is unchanged") {
        Pencil p = synthesize(inv_of("J0:2"));
        Pencil n = normalize_to_nilpotent(p, Eigenvalue(Rat(0)));
        CHECK(n.A == p.A);
        CHECK(n.B == p.B);
    }
    SECTION("wrong eigenvalue is rejected") {
        Pencil p = synthesize(inv_of("J0:1,J1:1"));
        CHECK_THROWS_AS(normalize_to_nilpotent(p, Eigenvalue(Rat(0))), Error);
    }
}

TEST_CASE("eigen-decomposition of Jordan pencils") {
    SECTION("two eigenvalues split") {
        Pencil p = synthesize(inv_of("J0:1,J1:1"));
        JordanContext ctx = make_jordan_context(p);
        auto factors = decompose_by_eigenvalue(ctx);
        REQUIRE(factors.size() == 2);
        CHECK(factors[0].eigenvalue == Eigenvalue(Rat(0)));
        CHECK(factors[1].eigenvalue == Eigenvalue(Rat(1)));
        CHECK(factors[0].pencil.dim == 2);
        // Factors are orthogonal w.r.t. both forms.
        MatQ cross_a = factors[0].embedding * p.A * factors[1].embedding.transpose();
        MatQ cross_b = factors[0].embedding * p.B * factors[1].embedding.transpose();
        CHECK(cross_a.is_zero());
        CHECK(cross_b.is_zero());
        std::size_t total = factors[0].pencil.dim + factors[1].pencil.dim;
        CHECK(total == p.dim);
    }
    SECTION("single eigenvalue gives one factor") {
        auto [p, s] = scramble(synthesize(inv_of("J1:2,J1:1")), 4);
        auto factors = decompose_by_eigenvalue(make_jordan_context(p));
        REQUIRE(factors.size() == 1);
        CHECK(factors[0].pencil.dim == 6);
        CHECK(factors[0].eigenvalue == Eigenvalue(Rat(1)));
    }
}

TEST_CASE("standard basis for nilpotent contexts") {
    SECTION("already standard pencil passes the congruence check") {
        Pencil p = synthesize(inv_of("J0:2,J0:1"));
        StandardBasis sb = standard_basis_nilpotent(make_nilpotent_context(p));
        MatQ st = sb.S.transpose();
        CHECK(st * p.A * sb.S == p.A);
        CHECK(st * p.B * sb.S == p.B);
    }
    SECTION("scrambled J_{0,4} + J_{0,2} recovers half-sizes (2,1)") {
        JKInvariants inv = inv_of("J0:2,J0:1");
        Pencil std_p = synthesize(inv);
        auto [p, s] = scramble(std_p, 17);
        StandardBasis sb = standard_basis_nilpotent(make_nilpotent_context(p));
        REQUIRE(sb.layout.size() == 2);
        CHECK(sb.layout[0].param == 2);
        CHECK(sb.layout[1].param == 1);
        MatQ st = sb.S.transpose();
        CHECK(st * p.A * sb.S == std_p.A);
        CHECK(st * p.B * sb.S == std_p.B);
    }
    SECTION("chains of a self-adjoint operator are isotropic") {
        auto [p, s] = scramble(synthesize(inv_of("J0:3,J0:1")), 23);
        JordanContext ctx = make_nilpotent_context(p);
        Rng rng(5);
        for (int it = 0; it < 10; ++it) {
            std::vector<Rat> v;
            for (std::size_t i = 0; i < p.dim; ++i) v.push_back(Rat(rng.range(-3, 3)));
            std::vector<std::vector<Rat>> chain{v};
            for (int k = 0; k < 4; ++k) chain.push_back(ctx.P.apply(chain.back()));
            for (const auto& x : chain)
                for (const auto& y : chain) CHECK(p.B.eval(x, y) == 0);
        }
    }
}

TEST_CASE("round trip property over random invariants") {
    Rng rng(2024);
    for (int it = 0; it < 8; ++it) {
        JKInvariants inv;
        std::size_t budget = 3 + rng.below(3); // half-size budget
        while (budget > 0) {
            std::size_t h = 1 + rng.below(budget);
            long ev = rng.range(-2, 2);
            inv.jordan.push_back({Eigenvalue(Rat(ev)), h});
            budget -= h;
        }
        if (rng.below(2)) inv.kronecker.push_back(rng.below(2));
        inv.canonicalize();
        auto [p, s] = scramble(synthesize(inv), rng.next());
        CHECK(jk_invariants(p) == inv);
    }
}

TEST_CASE("mantle is the core's complement at every regular value") {
    for (const char* spec : {"K:1", "J0:2;K:1", "J0:1,J2:1;K:1,K:0"}) {
        Pencil p = synthesize(inv_of(spec));
        auto [core, mantle] = core_mantle(p);
        std::size_t prank = pencil_rank(p);
        std::size_t checked = 0;
        for (long v = 0; checked < 4; ++v) {
            if (!is_regular_value(p, Rat(v), prank)) continue;
            CHECK(kernel(core.basis() * form_at(p, Rat(v))) == mantle);
            ++checked;
        }
    }
}
