#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "pencil_lab/census.hpp"
#include "pencil_lab/orbits.hpp"

namespace pencil_lab {

using nlohmann::json;

// Pencil file: {"dim": n, "A": [[...]], "B": [[...]]} with entries "p/q" or
// "p" (plain integers also accepted).

inline json matrix_to_json(const MatQ& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(rat_to_string(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline Rat rat_from_json(const json& v) {
    if (v.is_string()) return rat_from_string(v.get<std::string>());
    if (v.is_number_integer()) return Rat(static_cast<long>(v.get<long long>()));
    throw invalid_input("MalformedRational", "matrix entries must be strings or integers");
}

inline MatQ matrix_from_json(const json& rows, std::size_t expect_rows, std::size_t expect_cols) {
    if (!rows.is_array() || rows.size() != expect_rows)
        throw invalid_input("MalformedMatrix", "wrong number of rows");
    MatQ m(expect_rows, expect_cols);
    for (std::size_t i = 0; i < expect_rows; ++i) {
        if (!rows[i].is_array() || rows[i].size() != expect_cols)
            throw invalid_input("MalformedMatrix", "wrong number of columns");
        for (std::size_t j = 0; j < expect_cols; ++j) m.at(i, j) = rat_from_json(rows[i][j]);
    }
    return m;
}

inline json pencil_to_json(const Pencil& p) {
    json j;
    j["dim"] = p.dim;
    j["A"] = matrix_to_json(p.A);
    j["B"] = matrix_to_json(p.B);
    return j;
}

inline Pencil pencil_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("A") || !j.contains("B"))
        throw invalid_input("MalformedPencil", "expected {dim, A, B}");
    std::size_t n = j["dim"].get<std::size_t>();
    return make_pencil(matrix_from_json(j["A"], n, n), matrix_from_json(j["B"], n, n));
}

// Subspace file: {"ambient": n, "rows": [[...]]}.

inline json subspace_to_json(const Subspace& s) {
    json j;
    j["ambient"] = s.ambient();
    j["rows"] = matrix_to_json(s.basis());
    return j;
}

inline Subspace subspace_from_json(const json& j) {
    if (!j.is_object() || !j.contains("ambient") || !j.contains("rows"))
        throw invalid_input("MalformedSubspace", "expected {ambient, rows}");
    std::size_t n = j["ambient"].get<std::size_t>();
    if (!j["rows"].is_array()) throw invalid_input("MalformedSubspace", "rows must be an array");
    MatQ rows = matrix_from_json(j["rows"], j["rows"].size(), n);
    return Subspace(n, rows);
}

inline json invariants_to_json(const JKInvariants& inv) {
    json j;
    j["jordan"] = json::array();
    for (const auto& b : inv.jordan)
        j["jordan"].push_back({{"eigenvalue", b.eigenvalue.str()}, {"halfsize", b.halfsize}});
    j["kronecker"] = inv.kronecker;
    return j;
}

inline json descriptor_to_json(const OrbitDescriptor& d) {
    json j;
    switch (d.variant) {
        case OrbitDescriptor::Variant::Semisimple: {
            j["variant"] = "semisimple";
            json pairs = json::array();
            for (auto [h, n] : d.type.pairs) pairs.push_back({h, n});
            j["pairs"] = pairs;
            break;
        }
        case OrbitDescriptor::Variant::TypeI:
            j["variant"] = "type1";
            j["h"] = d.h;
            j["d"] = d.d;
            j["r"] = d.r;
            break;
        case OrbitDescriptor::Variant::TypeII:
            j["variant"] = "type2";
            j["h"] = d.h;
            j["d"] = d.d;
            j["r"] = d.r;
            j["delta"] = d.delta;
            if (d.z) j["z"] = *d.z;
            break;
        case OrbitDescriptor::Variant::Unsupported:
            j["variant"] = "unsupported";
            j["reason"] = d.reason;
            break;
    }
    return j;
}

inline OrbitDescriptor descriptor_from_json(const json& j) {
    std::string variant = j.at("variant").get<std::string>();
    if (variant == "semisimple") {
        SemisimpleType t;
        for (const auto& pr : j.at("pairs"))
            t.pairs.emplace_back(pr.at(0).get<std::size_t>(), pr.at(1).get<std::size_t>());
        return OrbitDescriptor::semisimple(t);
    }
    if (variant == "type1")
        return OrbitDescriptor::type1(j.at("h").get<std::size_t>(), j.at("d").get<std::size_t>(),
                                      j.at("r").get<std::size_t>());
    if (variant == "type2") {
        std::optional<std::size_t> z;
        if (j.contains("z")) z = j.at("z").get<std::size_t>();
        return OrbitDescriptor::type2(j.at("h").get<std::size_t>(), j.at("d").get<std::size_t>(),
                                      j.at("r").get<std::size_t>(), j.at("delta").get<int>(), z);
    }
    throw invalid_input("MalformedDescriptor", "unknown variant '" + variant + "'");
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("FileError", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw invalid_input("MalformedJson", std::string(e.what()));
    }
    return j;
}

} // namespace pencil_lab
