#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bmatrix.hpp"

namespace abmod {

/// Coordinates of a module element in the chosen basis.
using Element = std::vector<BSeries>;

/// An (a,b)-module of finite rank: a free module over truncated power series
/// in b together with the action of a, which satisfies ab - ba = b^2.
///
/// The presentation stores the matrix A(b) of a on the chosen basis
/// (column j = coordinates of a.e_j). The action on a general element
/// x = sum_j S_j(b) e_j is then forced by the commutation relation:
///
///   a(x) = A(b) x + b^2 x'
///
/// so the relation holds automatically for any A; validate() checks it by
/// direct evaluation, which pins the implementation of the action itself.
class ABModule {
public:
    ABModule() = default;

    ABModule(BMatrix a_matrix, std::vector<std::string> labels = {})
        : a_(std::move(a_matrix)), labels_(std::move(labels)) {
        if (a_.rows() != a_.cols()) throw DimensionMismatch("a-matrix must be square");
        if (labels_.empty()) {
            for (int i = 0; i < a_.rows(); ++i) labels_.push_back("e" + std::to_string(i + 1));
        }
        if (static_cast<int>(labels_.size()) != a_.rows())
            throw DimensionMismatch("label count must equal the rank");
    }

    int rank() const { return a_.rows(); }
    int precision() const { return a_.precision(); }
    const BMatrix& a_matrix() const { return a_; }
    const std::vector<std::string>& labels() const { return labels_; }

    ABModule with_labels(std::vector<std::string> labels) const { return ABModule(a_, std::move(labels)); }

    /// Basis element e_j (0-based) as an Element.
    Element basis_element(int j) const {
        Element e(static_cast<size_t>(rank()), BSeries::zero(precision()));
        e[static_cast<size_t>(j)] = BSeries::one(precision());
        return e;
    }

    Element zero_element() const {
        return Element(static_cast<size_t>(rank()), BSeries::zero(precision()));
    }

    friend bool operator==(const ABModule& e, const ABModule& f) {
        return e.rank() == f.rank() && e.a_matrix() == f.a_matrix();
    }
    friend bool operator!=(const ABModule& e, const ABModule& f) { return !(e == f); }

private:
    BMatrix a_;
    std::vector<std::string> labels_;
};

/// a(x) = A(b) x + b^2 x' (twisted Leibniz rule). Exact mod b^N: the
/// derivative loses one order but the b^2 shift regains it.
inline Element a_apply(const ABModule& e, const Element& x) {
    if (static_cast<int>(x.size()) != e.rank()) throw DimensionMismatch("a_apply: element has wrong length");
    Element out = e.a_matrix().apply(x);
    for (size_t j = 0; j < x.size(); ++j) {
        BSeries d = x[j].derivative().shifted(2);
        out[j] = (out[j] + d).truncated(std::min(out[j].precision(), x[j].precision()));
    }
    return out;
}

inline Element scale_element(const BSeries& s, const Element& x) {
    Element out(x.size(), BSeries());
    for (size_t j = 0; j < x.size(); ++j) out[j] = s * x[j];
    return out;
}

inline Element add_elements(const Element& x, const Element& y) {
    Element out(x.size(), BSeries());
    for (size_t j = 0; j < x.size(); ++j) out[j] = x[j] + y[j];
    return out;
}

inline Element sub_elements(const Element& x, const Element& y) {
    Element out(x.size(), BSeries());
    for (size_t j = 0; j < x.size(); ++j) out[j] = x[j] - y[j];
    return out;
}

inline bool element_is_zero(const Element& x) {
    for (const auto& s : x)
        if (!s.is_zero()) return false;
    return true;
}

/// Smallest valuation among the coordinates (== precision for zero).
inline int element_valuation(const Element& x) {
    int v = x.empty() ? 0 : x[0].precision();
    for (const auto& s : x) v = std::min(v, s.valuation());
    return v;
}

// ---------------------------------------------------------------------------
// constructors and functors
// ---------------------------------------------------------------------------

/// Elementary module E_lambda: rank one, a.e = lambda*b*e.
inline ABModule elementary(const Scalar& lambda, int precision) {
    BMatrix a(1, 1, precision);
    a.at(0, 0) = BSeries::monomial(lambda, 1, precision);
    return ABModule(a, {"e"});
}

inline ABModule direct_sum(const ABModule& e, const ABModule& f) {
    if (e.precision() != f.precision()) throw PrecisionMismatch("direct_sum: precision mismatch");
    std::vector<std::string> labels;
    for (const auto& l : e.labels()) labels.push_back(l + ".1");
    for (const auto& l : f.labels()) labels.push_back(l + ".2");
    return ABModule(BMatrix::block_diag(e.a_matrix(), f.a_matrix()), std::move(labels));
}

/// Conjugate module: same underlying set, a and b both negated. In matrix
/// form A(b) -> -A(-b).
inline ABModule conjugate(const ABModule& e) {
    std::vector<std::string> labels;
    for (const auto& l : e.labels()) labels.push_back(l + "~");
    return ABModule(-e.a_matrix().conj_b(), std::move(labels));
}

/// Dual module Hom(E, E_0) with the twisted action (L phi)(x) = a phi(x) -
/// phi(a x); on the dual basis this evaluates to A(b) -> -A(b)^T.
inline ABModule dual(const ABModule& e) {
    std::vector<std::string> labels;
    for (const auto& l : e.labels()) labels.push_back(l + "*");
    return ABModule(-e.a_matrix().transpose(), std::move(labels));
}

/// Adjoint module (conjugate of the dual; equals the dual of the conjugate
/// entrywise): A(b) -> A(-b)^T.
inline ABModule adjoint(const ABModule& e) {
    std::vector<std::string> labels;
    for (const auto& l : e.labels()) labels.push_back(l + "~*");
    return ABModule(e.a_matrix().conj_b().transpose(), std::move(labels));
}

/// Tensor product with basis e_i (x) f_j ordered row-major ((i,j) -> i*rank(F)+j);
/// the action a(v(x)w) = av(x)w + v(x)aw gives the Kronecker sum A(x)I + I(x)B.
inline ABModule tensor(const ABModule& e, const ABModule& f) {
    if (e.precision() != f.precision()) throw PrecisionMismatch("tensor: precision mismatch");
    int p = e.precision();
    BMatrix a = BMatrix::kronecker(e.a_matrix(), BMatrix::identity(f.rank(), p)) +
                BMatrix::kronecker(BMatrix::identity(e.rank(), p), f.a_matrix());
    std::vector<std::string> labels;
    for (const auto& le : e.labels())
        for (const auto& lf : f.labels()) labels.push_back(le + "(x)" + lf);
    return ABModule(a, std::move(labels));
}

/// Hom(E,F) as a module, realized as tensor(F, dual(E)); under the row-major
/// ordering a map with matrix M has coordinate vector vec(M) and the twisted
/// action is vec(B M - M A + b^2 M').
inline ABModule hom_module(const ABModule& e, const ABModule& f) {
    if (e.precision() != f.precision()) throw PrecisionMismatch("hom_module: precision mismatch");
    return tensor(f, dual(e));
}

/// Belgrade's delta-dual: maps E -> E_delta with [a.phi](x) = phi(ax) - a phi(x)
/// and [b.phi](x) = -b phi(x), realized as tensor(adjoint(E), E_delta), i.e.
/// A(-b)^T + delta*b*I. A coordinate vector u stands for the map
/// x |-> sum_j x_j(b) u_j(-b) e_delta (see delta_dual_evaluate).
inline ABModule delta_dual(const ABModule& e, const Scalar& delta) {
    return tensor(adjoint(e), elementary(delta, e.precision()));
}

/// Evaluation of a delta-dual element u on x in E; result is the coefficient
/// series of e_delta.
inline BSeries delta_dual_evaluate(const Element& u, const Element& x) {
    if (u.size() != x.size()) throw DimensionMismatch("delta_dual_evaluate");
    BSeries out = BSeries::zero(u.empty() ? 0 : u[0].precision());
    for (size_t j = 0; j < u.size(); ++j) out = out + x[j] * u[j].conj_b();
    return out;
}

/// Gauge change to the basis given by the columns of T (det T(0) != 0):
/// A -> T^{-1} (A T + b^2 T'). Returns the new presentation; T is the matrix
/// of the identity isomorphism from the new presentation to the old one.
inline ABModule base_change(const ABModule& e, const BMatrix& t) {
    if (t.rows() != e.rank() || t.cols() != e.rank()) throw DimensionMismatch("base_change: wrong shape");
    BMatrix tt = t.truncated(e.precision());
    BMatrix tinv = tt.inverse(); // throws NotInvertible when det T(0) == 0
    BMatrix dt = tt.derivative().shifted(2).truncated(e.precision());
    BMatrix a = tinv * (e.a_matrix() * tt + dt);
    return ABModule(a.truncated(e.precision()), e.labels());
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

struct ValidationReport {
    bool ok = true;
    int effective_precision = 0;
    std::vector<std::string> failures;
};

using AAction = std::function<Element(const ABModule&, const Element&)>;

/// Checks a(b e_j) - b a(e_j) = b^2 e_j for every basis vector by direct
/// evaluation through the supplied action (the module's own action by
/// default, in which case the relation holds by construction; an injected
/// action that drops the Leibniz term fails here).
inline ValidationReport validate(const ABModule& e, const AAction& action = a_apply) {
    ValidationReport rep;
    rep.effective_precision = e.precision();
    for (int j = 0; j < e.rank(); ++j) {
        Element ej = e.basis_element(j);
        Element bej = ej;
        for (auto& s : bej) s = s.shifted(1).truncated(e.precision());
        Element lhs = action(e, bej);
        Element rhs = action(e, ej);
        for (auto& s : rhs) s = s.shifted(1).truncated(e.precision());
        Element expect = ej;
        for (auto& s : expect) s = s.shifted(2).truncated(e.precision());
        Element diff = sub_elements(sub_elements(lhs, rhs), expect);
        int p = e.precision();
        for (const auto& s : diff) p = std::min(p, s.precision());
        rep.effective_precision = std::min(rep.effective_precision, p);
        if (!element_is_zero(diff))
            rep.failures.push_back("commutation relation fails on basis vector " + std::to_string(j));
    }
    rep.ok = rep.failures.empty();
    return rep;
}

} // namespace abmod
