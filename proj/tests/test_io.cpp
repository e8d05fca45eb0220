#include "test_helpers.hpp"

#include "pencil_lab/io.hpp"

using namespace plt;

TEST_CASE("pencil JSON round trip") {
    Pencil p = synthesize(inv_of("J1/2:2;K:1"));
    json j = pencil_to_json(p);
    Pencil back = pencil_from_json(j);
    CHECK(back.dim == p.dim);
    CHECK(back.A == p.A);
    CHECK(back.B == p.B);
}

TEST_CASE("pencil JSON accepts integers and normalizes rationals") {
    json j;
    j["dim"] = 2;
    j["A"] = json::array({json::array({0, "2/4"}), json::array({"-1/2", 0})});
    j["B"] = json::array({json::array({"0", "1"}), json::array({"-1", "0"})});
    Pencil p = pencil_from_json(j);
    CHECK(p.A.at(0, 1) == Rat(1, 2));
}

TEST_CASE("malformed pencils are rejected with typed errors") {
    json j;
    j["dim"] = 2;
    j["A"] = json::array({json::array({"0", "1"}), json::array({"-1", "0"})});
    SECTION("missing B") { CHECK_THROWS_AS(pencil_from_json(j), Error); }
    SECTION("bad rational") {
        j["B"] = json::array({json::array({"0", "x"}), json::array({"-x", "0"})});
        CHECK_THROWS_AS(pencil_from_json(j), Error);
    }
    SECTION("non-skew") {
        j["B"] = json::array({json::array({"0", "1"}), json::array({"1", "0"})});
        CHECK_THROWS_AS(pencil_from_json(j), Error);
    }
    SECTION("ragged rows") {
        j["B"] = json::array({json::array({"0", "1", "2"}), json::array({"-1", "0"})});
        CHECK_THROWS_AS(pencil_from_json(j), Error);
    }
}

TEST_CASE("subspace JSON round trip canonicalizes") {
    json j;
    j["ambient"] = 3;
    j["rows"] = json::array({json::array({"2", "4", "0"}), json::array({"1", "2", "0"})});
    Subspace s = subspace_from_json(j);
    CHECK(s.dim() == 1);
    CHECK(s.basis().at(0, 0) == 1);
    CHECK(s.basis().at(0, 1) == 2);
    Subspace back = subspace_from_json(subspace_to_json(s));
    CHECK(back == s);
}

TEST_CASE("descriptor JSON round trips") {
    SemisimpleType t;
    t.pairs = {{3, 3}, {1, 1}};
    for (const OrbitDescriptor& d :
         {OrbitDescriptor::semisimple(t), OrbitDescriptor::type1(3, 0, 1),
          OrbitDescriptor::type2(6, 0, 2, 1, 3), OrbitDescriptor::type2(2, 0, 1, 0)}) {
        OrbitDescriptor back = descriptor_from_json(descriptor_to_json(d));
        CHECK(back == d);
    }
}
