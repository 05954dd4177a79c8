#pragma once

#include <atomic>

#include "module.hpp"
#include "qlinalg.hpp"

namespace abmod {

namespace detail {
// Counts evaluative re-verifications of the intertwining equation performed
// anywhere in the process; the acceptance suite reads it.
inline std::atomic<long>& morphism_checks_run() {
    static std::atomic<long> n{0};
    return n;
}
inline std::atomic<long>& morphism_checks_failed() {
    static std::atomic<long> n{0};
    return n;
}
} // namespace detail

/// A morphism of (a,b)-modules: a b-linear map that intertwines the
/// a-actions. In matrix form B M + b^2 M' = M A (mod b^{N-1} for solver
/// output, whose matrices carry precision N-1).
class ABMorphism {
public:
    ABMorphism() = default;

    ABMorphism(ABModule domain, ABModule codomain, BMatrix matrix)
        : dom_(std::move(domain)), cod_(std::move(codomain)), m_(std::move(matrix)) {
        if (m_.rows() != cod_.rank() || m_.cols() != dom_.rank())
            throw DimensionMismatch("morphism matrix shape mismatch");
    }

    static ABMorphism identity(const ABModule& e) {
        return ABMorphism(e, e, BMatrix::identity(e.rank(), e.precision()));
    }

    static ABMorphism zero(const ABModule& e, const ABModule& f) {
        return ABMorphism(e, f, BMatrix(f.rank(), e.rank(), std::min(e.precision(), f.precision())));
    }

    const ABModule& domain() const { return dom_; }
    const ABModule& codomain() const { return cod_; }
    const BMatrix& matrix() const { return m_; }

    Element apply(const Element& x) const { return m_.apply(x); }

    /// Precision at which the intertwining equation is meaningful.
    int check_precision() const {
        return std::min(m_.precision(), std::min(dom_.precision(), cod_.precision()) - 1);
    }

    /// Residual B M + b^2 M' - M A, truncated to check_precision().
    BMatrix intertwining_residual() const {
        BMatrix lhs = cod_.a_matrix() * m_ + m_.derivative().shifted(2);
        BMatrix rhs = m_ * dom_.a_matrix();
        return (lhs - rhs).truncated(check_precision());
    }

    /// Evaluative verification (counts toward the global re-check tally).
    bool verify() const {
        bool ok = intertwining_residual().is_zero();
        detail::morphism_checks_run()++;
        if (!ok) detail::morphism_checks_failed()++;
        return ok;
    }

    friend ABMorphism operator+(const ABMorphism& f, const ABMorphism& g) {
        return ABMorphism(f.dom_, f.cod_, f.m_ + g.m_);
    }

    friend ABMorphism operator*(const Scalar& c, const ABMorphism& f) {
        return ABMorphism(f.dom_, f.cod_, c * f.m_);
    }

private:
    ABModule dom_, cod_;
    BMatrix m_;
};

/// g after f (matrix product); domains must match up.
inline ABMorphism compose(const ABMorphism& g, const ABMorphism& f) {
    if (g.domain().rank() != f.codomain().rank() || g.domain() != f.codomain())
        throw DimensionMismatch("compose: domain of g differs from codomain of f");
    return ABMorphism(f.domain(), g.codomain(), g.matrix() * f.matrix());
}

/// Invertible iff det M(0) != 0 (units of the truncated series ring).
inline bool is_invertible(const ABMorphism& f) {
    if (f.matrix().rows() != f.matrix().cols()) return false;
    QMatrix c0(f.matrix().rows(), f.matrix().cols(), f.matrix().constant_term());
    return !c0.det().is_zero();
}

/// Exact inverse mod the matrix precision; throws NotInvertible.
inline ABMorphism inverse(const ABMorphism& f) {
    if (f.matrix().rows() != f.matrix().cols()) throw NotInvertible("inverse of non-square morphism");
    return ABMorphism(f.codomain(), f.domain(), f.matrix().inverse());
}

/// The adjoint morphism adjoint(F) -> adjoint(E) with matrix M(-b)^T.
inline ABMorphism adjoint_of_morphism(const ABMorphism& f) {
    return ABMorphism(adjoint(f.codomain()), adjoint(f.domain()), f.matrix().conj_b().transpose());
}

/// Canonical injection of the i-th summand (i = 0 for E, 1 for F).
inline ABMorphism injection(const ABModule& e, const ABModule& f, int which) {
    ABModule s = direct_sum(e, f);
    const ABModule& part = which == 0 ? e : f;
    BMatrix m(s.rank(), part.rank(), s.precision());
    int off = which == 0 ? 0 : e.rank();
    for (int j = 0; j < part.rank(); ++j) m.at(off + j, j) = BSeries::one(s.precision());
    return ABMorphism(part, s, std::move(m));
}

/// Canonical projection onto the i-th summand.
inline ABMorphism projection(const ABModule& e, const ABModule& f, int which) {
    ABModule s = direct_sum(e, f);
    const ABModule& part = which == 0 ? e : f;
    BMatrix m(part.rank(), s.rank(), s.precision());
    int off = which == 0 ? 0 : e.rank();
    for (int j = 0; j < part.rank(); ++j) m.at(j, off + j) = BSeries::one(s.precision());
    return ABMorphism(s, part, std::move(m));
}

} // namespace abmod
