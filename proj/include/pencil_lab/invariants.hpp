#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "pencil_lab/errors.hpp"
#include "pencil_lab/rational.hpp"

namespace pencil_lab {

// Eigenvalue of a pencil: a rational number or infinity.
class Eigenvalue {
public:
    Eigenvalue() : infinite_(false), value_(0) {}
    explicit Eigenvalue(Rat v) : infinite_(false), value_(std::move(v)) {}
    static Eigenvalue infinity() {
        Eigenvalue e;
        e.infinite_ = true;
        return e;
    }

    bool is_infinite() const { return infinite_; }
    const Rat& value() const {
        if (infinite_) throw invalid_input("InfiniteEigenvalue", "no finite value");
        return value_;
    }

    friend bool operator==(const Eigenvalue& a, const Eigenvalue& b) {
        if (a.infinite_ != b.infinite_) return false;
        return a.infinite_ || a.value_ == b.value_;
    }
    friend bool operator!=(const Eigenvalue& a, const Eigenvalue& b) { return !(a == b); }
    // Finite values ascending; infinity greatest.
    friend bool operator<(const Eigenvalue& a, const Eigenvalue& b) {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        return a.value_ < b.value_;
    }

    std::string str() const { return infinite_ ? "inf" : rat_to_string(value_); }

    static Eigenvalue parse(const std::string& s) {
        if (s == "inf" || s == "infinity" || s == "oo") return infinity();
        return Eigenvalue(rat_from_string(s));
    }

private:
    bool infinite_;
    Rat value_;
};

struct JordanBlockSpec {
    Eigenvalue eigenvalue;
    std::size_t halfsize = 0; // block dimension is 2*halfsize
};

// Jordan-Kronecker invariants: a multiset of Jordan blocks (eigenvalue,
// half-size) and a multiset of Kronecker parameters k (block dimension 2k+1).
struct JKInvariants {
    std::vector<JordanBlockSpec> jordan;    // sorted by (eigenvalue, halfsize desc)
    std::vector<std::size_t> kronecker;     // k values, sorted descending

    void canonicalize() {
        std::sort(jordan.begin(), jordan.end(), [](const JordanBlockSpec& a, const JordanBlockSpec& b) {
            if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
            return a.halfsize > b.halfsize;
        });
        std::sort(kronecker.begin(), kronecker.end(), std::greater<>());
    }

    std::size_t dim() const {
        std::size_t d = 0;
        for (const auto& j : jordan) d += 2 * j.halfsize;
        for (std::size_t k : kronecker) d += 2 * k + 1;
        return d;
    }

    std::size_t jordan_dim() const {
        std::size_t d = 0;
        for (const auto& j : jordan) d += 2 * j.halfsize;
        return d;
    }

    bool is_jordan() const { return kronecker.empty() && !jordan.empty(); }
    bool is_kronecker() const { return jordan.empty(); }

    bool single_eigenvalue() const {
        if (!is_jordan()) return false;
        for (const auto& j : jordan)
            if (j.eigenvalue != jordan.front().eigenvalue) return false;
        return true;
    }

    // Half-sizes of the Jordan blocks with the given eigenvalue, descending.
    std::vector<std::size_t> halfsizes(const Eigenvalue& ev) const {
        std::vector<std::size_t> hs;
        for (const auto& j : jordan)
            if (j.eigenvalue == ev) hs.push_back(j.halfsize);
        std::sort(hs.begin(), hs.end(), std::greater<>());
        return hs;
    }

    std::vector<Eigenvalue> spectrum() const {
        std::vector<Eigenvalue> evs;
        for (const auto& j : jordan) {
            bool seen = false;
            for (const auto& e : evs) seen = seen || e == j.eigenvalue;
            if (!seen) evs.push_back(j.eigenvalue);
        }
        std::sort(evs.begin(), evs.end());
        return evs;
    }

    friend bool operator==(const JKInvariants& a, const JKInvariants& b) {
        if (a.kronecker != b.kronecker || a.jordan.size() != b.jordan.size()) return false;
        for (std::size_t i = 0; i < a.jordan.size(); ++i)
            if (a.jordan[i].eigenvalue != b.jordan[i].eigenvalue ||
                a.jordan[i].halfsize != b.jordan[i].halfsize)
                return false;
        return true;
    }
    friend bool operator!=(const JKInvariants& a, const JKInvariants& b) { return !(a == b); }

    // Text form, e.g. "J0:3,J0:1;K:1" (Jordan eigenvalue:half-size pairs, then
    // Kronecker k values).
    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < jordan.size(); ++i) {
            if (i) s += ",";
            s += "J" + jordan[i].eigenvalue.str() + ":" + std::to_string(jordan[i].halfsize);
        }
        if (!kronecker.empty()) {
            if (!jordan.empty()) s += ";";
            for (std::size_t i = 0; i < kronecker.size(); ++i) {
                if (i) s += ",";
                s += "K:" + std::to_string(kronecker[i]);
            }
        }
        if (s.empty()) s = "empty";
        return s;
    }

    static JKInvariants parse(const std::string& text);
};

inline JKInvariants JKInvariants::parse(const std::string& text) {
    JKInvariants inv;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find_first_of(",;", pos);
        std::string tok = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        pos = end == std::string::npos ? text.size() : end + 1;
        if (tok.empty()) continue;
        std::size_t colon = tok.find(':');
        if (colon == std::string::npos)
            throw invalid_input("MalformedInvariants", "token '" + tok + "' lacks ':'");
        std::string head = tok.substr(0, colon);
        std::string num = tok.substr(colon + 1);
        try {
            if (head == "K") {
                long k = std::stol(num);
                if (k < 0) throw invalid_input("MalformedInvariants", "negative Kronecker k");
                inv.kronecker.push_back(static_cast<std::size_t>(k));
            } else if (!head.empty() && head[0] == 'J') {
                long n = std::stol(num);
                if (n < 1) throw invalid_input("MalformedInvariants", "Jordan half-size must be >= 1");
                inv.jordan.push_back({Eigenvalue::parse(head.substr(1)), static_cast<std::size_t>(n)});
            } else {
                throw invalid_input("MalformedInvariants", "unknown token '" + tok + "'");
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw invalid_input("MalformedInvariants", "cannot parse token '" + tok + "'");
        }
    }
    inv.canonicalize();
    return inv;
}

} // namespace pencil_lab
