// pencil-lab: exact computations with pencils of skew-symmetric forms.
//
// Subcommands cover invariant extraction (jk-invariants, core-mantle,
// standard-basis), subspace predicates and constructions (check-bilagrangian,
// classify, reduce, push, extend, random-bilagrangian, complementary via
// classify tooling), orbit data (orbit-dim, vector-orbit, formulas,
// invariant-subspaces, invariant-bilagrangian) and the finite-field census.
//
// Exit codes: 0 ok, 1 check answered "false", 2 invalid input, 3 unsupported.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "pencil_lab/io.hpp"

using namespace pencil_lab;

namespace {

std::size_t max_dim() {
    if (const char* v = std::getenv("PENCIL_LAB_MAX_DIM")) {
        long parsed = std::atol(v);
        if (parsed > 0) return static_cast<std::size_t>(parsed);
    }
    return 24;
}

void check_dim(std::size_t dim) {
    if (dim > max_dim())
        throw unsupported("TooLarge", "ambient dimension " + std::to_string(dim) +
                                          " exceeds PENCIL_LAB_MAX_DIM");
}

Pencil load_pencil(const std::string& path) {
    Pencil p = pencil_from_json(load_json_file(path));
    check_dim(p.dim);
    return p;
}

Subspace load_subspace(const std::string& path) {
    Subspace s = subspace_from_json(load_json_file(path));
    check_dim(s.ambient());
    return s;
}

JKInvariants parse_invariants(const std::string& spec) {
    JKInvariants inv = JKInvariants::parse(spec);
    check_dim(inv.dim());
    return inv;
}

// Single-eigenvalue Jordan pencils get a nilpotent context; the subspace
// coordinates are untouched by the generator change.
JordanContext nilpotent_context_of(const Pencil& p) {
    JKInvariants inv = jk_invariants(p);
    if (!inv.single_eigenvalue())
        throw unsupported("UnsupportedAmbient",
                          "operation needs a Jordan pencil with a single eigenvalue");
    return make_nilpotent_context(normalize_to_nilpotent(p, inv.jordan.front().eigenvalue));
}

void require_bilagrangian(const Pencil& p, const Subspace& L) {
    if (!classify_subspace(p, L).bi_lagrangian)
        throw invalid_input("NotBiLagrangian", "input subspace is not bi-Lagrangian");
}

std::string heights_str(const std::vector<std::size_t>& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

struct Options {
    std::string pencil_file, subspace_file, u_file, invariants, query, heights;
    std::uint64_t seed = 0;
    bool have_seed = false;
    bool as_json = false;
    std::uint32_t prime = 2;
    std::size_t workers = 1;
    long r_param = -1;
};

int run(const std::string& cmd, const Options& opt) {
    json out;

    if (cmd == "synthesize") {
        Pencil p = synthesize(parse_invariants(opt.invariants));
        if (opt.as_json) {
            std::cout << pencil_to_json(p).dump(2) << "\n";
        } else {
            std::cout << "dim " << p.dim << "\nA =\n" << p.A.str() << "\nB =\n" << p.B.str() << "\n";
        }
        return 0;
    }

    if (cmd == "scramble") {
        if (!opt.have_seed) throw invalid_input("MissingSeed", "scramble requires --seed");
        Pencil p = load_pencil(opt.pencil_file);
        auto [sp, s] = scramble(p, opt.seed);
        json j = pencil_to_json(sp);
        j["S"] = matrix_to_json(s);
        if (opt.as_json) {
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "dim " << sp.dim << "\nA =\n" << sp.A.str() << "\nB =\n"
                      << sp.B.str() << "\nS =\n" << s.str() << "\n";
        }
        return 0;
    }

    if (cmd == "jk-invariants") {
        Pencil p = load_pencil(opt.pencil_file);
        JKInvariants inv = jk_invariants(p);
        if (opt.as_json)
            std::cout << invariants_to_json(inv).dump(2) << "\n";
        else
            std::cout << "invariants: " << inv.str() << "\n";
        return 0;
    }

    if (cmd == "standard-basis") {
        Pencil p = load_pencil(opt.pencil_file);
        JKInvariants inv = jk_invariants(p);
        if (!inv.single_eigenvalue())
            throw unsupported("UnsupportedAmbient",
                              "standard bases need a Jordan pencil with a single eigenvalue");
        Eigenvalue ev = inv.jordan.front().eigenvalue;
        JordanContext ctx = make_nilpotent_context(normalize_to_nilpotent(p, ev));
        StandardBasis sb = standard_basis_nilpotent(ctx);
        // S is simultaneously a standard basis for the original generators;
        // label the blocks with the original eigenvalue.
        for (BlockRef& b : sb.layout) b.eigenvalue = ev;
        if (opt.as_json) {
            json layout = json::array();
            for (const BlockRef& b : sb.layout)
                layout.push_back({{"type", "jordan"},
                                  {"eigenvalue", b.eigenvalue.str()},
                                  {"halfsize", b.param},
                                  {"e_cols", b.e_cols},
                                  {"f_cols", b.f_cols}});
            out["S"] = matrix_to_json(sb.S);
            out["layout"] = layout;
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << "blocks:";
            for (const BlockRef& b : sb.layout) std::cout << " J" << b.eigenvalue.str() << ":" << b.param;
            std::cout << "\nS =\n" << sb.S.str() << "\n";
        }
        return 0;
    }

    if (cmd == "core-mantle") {
        Pencil p = load_pencil(opt.pencil_file);
        auto [core, mantle] = core_mantle(p);
        if (opt.as_json) {
            out["core"] = subspace_to_json(core);
            out["mantle"] = subspace_to_json(mantle);
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << "core (dim " << core.dim() << "):\n" << core.basis().str()
                      << "\nmantle (dim " << mantle.dim() << "):\n" << mantle.basis().str() << "\n";
        }
        return 0;
    }

    if (cmd == "check-bilagrangian") {
        Pencil p = load_pencil(opt.pencil_file);
        Subspace s = load_subspace(opt.subspace_file);
        SubspaceReport rep = classify_subspace(p, s);
        if (opt.as_json) {
            out["isotropic_A"] = rep.isotropic_A;
            out["isotropic_B"] = rep.isotropic_B;
            out["bi_isotropic"] = rep.bi_isotropic;
            out["admissible"] = rep.admissible;
            out["bi_lagrangian"] = rep.bi_lagrangian;
            out["dim"] = rep.dim;
            out["target_dim"] = rep.target_dim;
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << (rep.bi_lagrangian ? "true" : "false") << "\n";
        }
        return rep.bi_lagrangian ? 0 : 1;
    }

    if (cmd == "classify") {
        Pencil p = load_pencil(opt.pencil_file);
        Subspace L = load_subspace(opt.subspace_file);
        require_bilagrangian(p, L);
        JordanContext ctx = nilpotent_context_of(p);
        NilpotentSpace<Rat> ns = nilpotent_space_of(ctx);
        OrbitDescriptor desc;
        if (auto ty = semisimple_type_table(ns, L)) {
            desc = OrbitDescriptor::semisimple(*ty);
        } else if (ns.halfsizes.size() == 2 && size_classes(ns).size() == 2) {
            desc = classify_two_blocks_impl(ns, L);
        } else {
            throw unsupported("UnsupportedAmbient",
                              "indecomposable subspaces are classified only over two distinct "
                              "Jordan blocks");
        }
        if (opt.as_json)
            std::cout << descriptor_to_json(desc).dump(2) << "\n";
        else
            std::cout << desc.str() << "\n";
        return 0;
    }

    if (cmd == "reduce") {
        Pencil p = load_pencil(opt.pencil_file);
        Subspace u = load_subspace(opt.subspace_file);
        Reduction red = reduce(p, u);
        if (opt.as_json) {
            out["quotient"] = pencil_to_json(red.quotient);
            out["section"] = matrix_to_json(red.section);
            out["projection"] = matrix_to_json(red.projection);
            out["uperp"] = subspace_to_json(red.Uperp);
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << "quotient dim " << red.quotient.dim << "\nA' =\n" << red.quotient.A.str()
                      << "\nB' =\n" << red.quotient.B.str() << "\n";
        }
        return 0;
    }

    if (cmd == "push") {
        Pencil p = load_pencil(opt.pencil_file);
        Subspace u = load_subspace(opt.u_file);
        Subspace L = load_subspace(opt.subspace_file);
        Reduction red = reduce(p, u);
        Subspace pushed = push_subspace(red, L);
        if (opt.as_json)
            std::cout << subspace_to_json(pushed).dump(2) << "\n";
        else
            std::cout << "pushed (dim " << pushed.dim() << "):\n" << pushed.basis().str() << "\n";
        return 0;
    }

    if (cmd == "extend") {
        Pencil p = load_pencil(opt.pencil_file);
        Subspace u = load_subspace(opt.subspace_file);
        try {
            Subspace L = extend_to_bilagrangian(p, u);
            if (opt.as_json)
                std::cout << subspace_to_json(L).dump(2) << "\n";
            else
                std::cout << "extended (dim " << L.dim() << "):\n" << L.basis().str() << "\n";
            return 0;
        } catch (const NotExtendableError& e) {
            if (opt.as_json) {
                out["extendable"] = false;
                out["reason"] = e.what();
                json w = json::array();
                for (const auto& vec : e.witness()) {
                    json row = json::array();
                    for (const Rat& x : vec) row.push_back(rat_to_string(x));
                    w.push_back(row);
                }
                out["witness"] = w;
                std::cout << out.dump(2) << "\n";
            } else {
                std::cout << "not extendable: " << e.what() << "\n";
            }
            return 1;
        }
    }

    if (cmd == "orbit-dim") {
        Pencil p = load_pencil(opt.pencil_file);
        Subspace L = load_subspace(opt.subspace_file);
        require_bilagrangian(p, L);
        std::size_t d = orbit_tangent_dim(aut_algebra(p), L);
        if (opt.as_json) {
            out["orbit_dim"] = d;
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << d << "\n";
        }
        return 0;
    }

    if (cmd == "vector-orbit") {
        Pencil p = load_pencil(opt.pencil_file);
        Subspace v = load_subspace(opt.subspace_file);
        if (v.dim() > 1) throw invalid_input("MalformedSubspace", "vector file must have one row");
        std::vector<Rat> vec(v.ambient(), Rat(0));
        if (v.dim() == 1) vec = v.basis().row(0);
        JordanContext ctx = nilpotent_context_of(p);
        auto tuple = vector_orbit_representative(ctx, vec);
        if (opt.as_json) {
            out["heights"] = tuple;
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << heights_str(tuple) << "\n";
        }
        return 0;
    }

    if (cmd == "random-bilagrangian") {
        if (!opt.have_seed) throw invalid_input("MissingSeed", "random-bilagrangian requires --seed");
        Pencil p = load_pencil(opt.pencil_file);
        Subspace L = random_bilagrangian(p, opt.seed);
        if (opt.as_json)
            std::cout << subspace_to_json(L).dump(2) << "\n";
        else
            std::cout << "subspace (dim " << L.dim() << "):\n" << L.basis().str() << "\n";
        return 0;
    }

    if (cmd == "invariant-subspaces") {
        JKInvariants inv = parse_invariants(opt.invariants);
        auto list = invariant_subspaces(inv);
        if (opt.as_json) {
            json arr = json::array();
            for (const auto& d : list) arr.push_back(d.heights);
            out["heights"] = arr;
            out["count"] = list.size();
            std::cout << out.dump(2) << "\n";
        } else {
            for (const auto& d : list) std::cout << heights_str(d.heights) << "\n";
            std::cout << "count: " << list.size() << "\n";
        }
        return 0;
    }

    if (cmd == "invariant-bilagrangian") {
        JKInvariants inv = parse_invariants(opt.invariants);
        auto L = invariant_bilagrangian(inv);
        if (opt.as_json) {
            if (L)
                out["subspace"] = subspace_to_json(*L);
            else
                out["subspace"] = nullptr;
            std::cout << out.dump(2) << "\n";
        } else if (L) {
            std::cout << "subspace (dim " << L->dim() << "):\n" << L->basis().str() << "\n";
        } else {
            std::cout << "absent\n";
        }
        return 0;
    }

    if (cmd == "census") {
        JKInvariants inv = parse_invariants(opt.invariants);
        auto hist = ff_orbit_histogram(inv, opt.prime, opt.workers);
        std::size_t total = 0;
        for (auto& [k, c] : hist) total += c;
        if (opt.as_json) {
            out["prime"] = opt.prime;
            out["classes"] = json::object();
            for (auto& [k, c] : hist) out["classes"][k] = c;
            out["total"] = total;
            std::cout << out.dump(2) << "\n";
        } else {
            for (auto& [k, c] : hist) std::cout << k << ": " << c << "\n";
            std::cout << "classes: " << hist.size() << ", total: " << total << "\n";
        }
        return 0;
    }

    if (cmd == "formulas") {
        JKInvariants inv = parse_invariants(opt.invariants);
        if (!inv.single_eigenvalue())
            throw invalid_input("QueryShapeMismatch",
                                "formulas need a single-eigenvalue Jordan ambient");
        std::vector<std::size_t> hs = inv.halfsizes(inv.jordan.front().eigenvalue);
        std::string result;
        if (opt.query == "blg-dim") {
            result = std::to_string(formula_blg_dim(hs));
        } else if (opt.query == "one-block-orbits") {
            if (hs.size() != 1) throw invalid_input("QueryShapeMismatch", "needs one Jordan block");
            result = std::to_string(formula_one_block_orbits(hs[0]));
        } else if (opt.query == "equal-block-orbits") {
            for (std::size_t h : hs)
                if (h != hs[0])
                    throw invalid_input("QueryShapeMismatch", "needs equal Jordan blocks");
            result = formula_equal_block_orbits(hs[0], hs.size()).str();
        } else if (opt.query == "semisimple-types") {
            result = formula_semisimple_types(inv).str();
        } else if (opt.query == "two-block-semisimple-orbits") {
            if (hs.size() != 2 || hs[0] == hs[1])
                throw invalid_input("QueryShapeMismatch", "needs two distinct Jordan blocks");
            result = formula_two_block_semisimple_orbits(hs[0], hs[1]).str();
        } else if (opt.query == "semisimple-orbit-dim") {
            SemisimpleType t;
            std::vector<std::size_t> heights;
            std::size_t pos = 0;
            const std::string& text = opt.heights;
            while (pos < text.size()) {
                std::size_t end = text.find(',', pos);
                heights.push_back(std::stoul(
                    text.substr(pos, end == std::string::npos ? std::string::npos : end - pos)));
                pos = end == std::string::npos ? text.size() : end + 1;
            }
            if (heights.size() != hs.size())
                throw invalid_input("QueryShapeMismatch",
                                    "--heights must list one height per Jordan block");
            for (std::size_t i = 0; i < hs.size(); ++i) {
                if (2 * heights[i] < hs[i] || heights[i] > hs[i])
                    throw invalid_input("QueryShapeMismatch",
                                        "heights must satisfy ceil(n/2) <= h <= n");
                t.pairs.emplace_back(heights[i], hs[i]);
            }
            result = std::to_string(formula_semisimple_orbit_dim(t));
        } else if (opt.query == "type2s-orbit-dim") {
            if (hs.size() != 2 || hs[0] <= hs[1])
                throw invalid_input("QueryShapeMismatch", "needs two distinct Jordan blocks");
            if (opt.r_param < 1) throw invalid_input("QueryShapeMismatch", "--r is required");
            result = std::to_string(
                formula_type2s_orbit_dim(hs[0], hs[1], static_cast<std::size_t>(opt.r_param)));
        } else {
            throw invalid_input("QueryShapeMismatch", "unknown query '" + opt.query + "'");
        }
        if (opt.as_json) {
            out["query"] = opt.query;
            out["value"] = result;
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << result << "\n";
        }
        return 0;
    }

    throw invalid_input("UnknownCommand", "no such subcommand '" + cmd + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Jordan-Kronecker invariants and bi-Lagrangian subspace classification"};
    app.require_subcommand(1);

    Options opt;
    std::string chosen;
    const std::vector<std::string> names = {
        "jk-invariants", "standard-basis", "core-mantle", "check-bilagrangian", "classify",
        "reduce", "push", "extend", "orbit-dim", "formulas", "invariant-subspaces",
        "invariant-bilagrangian", "vector-orbit", "random-bilagrangian", "census", "scramble",
        "synthesize"};
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--pencil", opt.pencil_file, "pencil JSON file");
        sub->add_option("--subspace", opt.subspace_file, "subspace JSON file");
        sub->add_option("--u", opt.u_file, "reduced subspace JSON file (push)");
        sub->add_option("--seed", opt.seed, "PRNG seed")
            ->check(CLI::NonNegativeNumber)
            ->each([&opt](const std::string&) { opt.have_seed = true; });
        sub->add_flag("--json", opt.as_json, "machine-readable output");
        sub->add_option("--prime", opt.prime, "census prime (<= 13)");
        sub->add_option("--workers", opt.workers, "census worker threads");
        sub->add_option("--invariants", opt.invariants,
                        "invariant spec, e.g. \"J0:3,J0:1;K:1\"");
        sub->add_option("--query", opt.query, "formulas query name");
        sub->add_option("--heights", opt.heights, "heights list for semisimple-orbit-dim");
        sub->add_option("--r", opt.r_param, "r parameter for type2s-orbit-dim");
        sub->callback([&chosen, name]() { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run(chosen, opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.error_class()) {
            case ErrorClass::CheckFailed: return 1;
            case ErrorClass::InvalidInput: return 2;
            case ErrorClass::Unsupported: return 3;
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
