#pragma once

#include <cstddef>
#include <vector>

#include "pencil_lab/matrix.hpp"

namespace pencil_lab {

// Linear subspace of F^n, stored as the RREF of a spanning row set. Two
// subspaces are equal iff their canonical bases are entrywise equal.
template <class F>
class SubspaceT {
public:
    SubspaceT() = default;

    // Canonicalizes the span of the given rows.
    SubspaceT(std::size_t ambient, const Matrix<F>& spanning_rows) : ambient_(ambient) {
        if (spanning_rows.rows() > 0 && spanning_rows.cols() != ambient)
            throw invalid_input("AmbientMismatch", "spanning rows have wrong width");
        RrefResult<F> r = rref(spanning_rows);
        basis_ = Matrix<F>(r.rank, ambient);
        for (std::size_t i = 0; i < r.rank; ++i)
            for (std::size_t j = 0; j < ambient; ++j) basis_.at(i, j) = r.reduced.at(i, j);
        pivots_ = r.pivots;
    }

    static SubspaceT zero(std::size_t ambient) { return SubspaceT(ambient, Matrix<F>(0, ambient)); }
    static SubspaceT full(std::size_t ambient) {
        return SubspaceT(ambient, Matrix<F>::identity(ambient));
    }
    static SubspaceT span_of(std::size_t ambient, const std::vector<std::vector<F>>& vecs) {
        return SubspaceT(ambient, Matrix<F>::from_rows(vecs));
    }

    std::size_t ambient() const { return ambient_; }
    std::size_t dim() const { return basis_.rows(); }
    const Matrix<F>& basis() const { return basis_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    bool operator==(const SubspaceT& o) const {
        return ambient_ == o.ambient_ && basis_ == o.basis_;
    }
    bool operator!=(const SubspaceT& o) const { return !(*this == o); }
    // Lexicographic on (dim, pivot columns, entries); a deterministic total order.
    bool operator<(const SubspaceT& o) const {
        if (dim() != o.dim()) return dim() < o.dim();
        if (pivots_ != o.pivots_) return pivots_ < o.pivots_;
        for (std::size_t i = 0; i < basis_.rows(); ++i)
            for (std::size_t j = 0; j < basis_.cols(); ++j) {
                if (basis_.at(i, j) == o.basis_.at(i, j)) continue;
                return field_traits<F>::str(basis_.at(i, j)) <
                       field_traits<F>::str(o.basis_.at(i, j));
            }
        return false;
    }

    bool contains(const std::vector<F>& v) const {
        std::vector<F> r = reduce_mod(v);
        for (const F& x : r)
            if (!field_traits<F>::is_zero(x)) return false;
        return true;
    }

    bool contains(const SubspaceT& o) const {
        for (std::size_t i = 0; i < o.dim(); ++i)
            if (!contains(o.basis_.row(i))) return false;
        return true;
    }

    // Remainder of v after eliminating pivot coordinates with basis rows.
    std::vector<F> reduce_mod(const std::vector<F>& v) const {
        if (v.size() != ambient_) throw invalid_input("AmbientMismatch", "vector width");
        std::vector<F> r = v;
        for (std::size_t i = 0; i < basis_.rows(); ++i) {
            const F& c = r[pivots_[i]];
            if (field_traits<F>::is_zero(c)) continue;
            F f = c;
            for (std::size_t j = 0; j < ambient_; ++j) r[j] -= f * basis_.at(i, j);
        }
        return r;
    }

    // Annihilator {y : y . v = 0 for v in this} as a subspace of the dual,
    // identified with F^n via the standard pairing.
    SubspaceT annihilator() const {
        return SubspaceT(ambient_, kernel_basis(basis_));
    }

    // Image under an operator (columns convention): span of {P v : v in basis}.
    SubspaceT image_under(const Matrix<F>& op) const {
        Matrix<F> rows(basis_.rows(), ambient_);
        for (std::size_t i = 0; i < basis_.rows(); ++i) {
            std::vector<F> img = op.apply(basis_.row(i));
            rows.set_row(i, img);
        }
        return SubspaceT(ambient_, rows);
    }

    bool is_invariant_under(const Matrix<F>& op) const {
        for (std::size_t i = 0; i < basis_.rows(); ++i)
            if (!contains(op.apply(basis_.row(i)))) return false;
        return true;
    }

private:
    std::size_t ambient_ = 0;
    Matrix<F> basis_;
    std::vector<std::size_t> pivots_;
};

enum class MeetJoinKind { Intersect, Sum };

template <class F>
SubspaceT<F> join(const SubspaceT<F>& a, const SubspaceT<F>& b) {
    if (a.ambient() != b.ambient())
        throw invalid_input("AmbientMismatch", "sum of subspaces of different spaces");
    return SubspaceT<F>(a.ambient(), a.basis().vstack(b.basis()));
}

template <class F>
SubspaceT<F> meet(const SubspaceT<F>& a, const SubspaceT<F>& b) {
    if (a.ambient() != b.ambient())
        throw invalid_input("AmbientMismatch", "intersection of subspaces of different spaces");
    // x in a iff Ann(a) . x = 0; stack both annihilators and take the kernel.
    Matrix<F> constraints = a.annihilator().basis().vstack(b.annihilator().basis());
    return SubspaceT<F>(a.ambient(), kernel_basis(constraints));
}

template <class F>
SubspaceT<F> meet_join(const SubspaceT<F>& a, const SubspaceT<F>& b, MeetJoinKind kind) {
    return kind == MeetJoinKind::Intersect ? meet(a, b) : join(a, b);
}

// {x : m x = 0} as a subspace of F^cols.
template <class F>
SubspaceT<F> kernel(const Matrix<F>& m) {
    return SubspaceT<F>(m.cols(), kernel_basis(m));
}

using Subspace = SubspaceT<Rat>;
using SubspaceP = SubspaceT<GFp>;

} // namespace pencil_lab
