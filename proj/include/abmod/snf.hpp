#pragma once

#include "bmatrix.hpp"
#include "qlinalg.hpp"

namespace abmod {

/// Smith normal form over the truncated series ring C[[b]]/b^N, which is a
/// discrete valuation ring up to the truncation ideal: U * M * V = D with U,
/// V invertible (unit constant-term determinants) and D diagonal with entries
/// b^{k_1} | b^{k_2} | ... Entries that vanish at precision are reported with
/// valuation N.
struct SmithForm {
    BMatrix u, d, v;
    std::vector<int> valuations; // one per diagonal slot, N means zero at precision
    int rank = 0;                // number of diagonal entries nonzero at precision
};

namespace snfdetail {

/// Extends a series to the working precision by the zero lift. Division
/// results and unit inverses inside the reduction are only determined up to
/// b^{prec-v}; fixing the zero lift makes every transform an exact
/// polynomial identity mod b^prec.
inline BSeries zero_lift(const BSeries& s, int prec) {
    if (s.precision() >= prec) return s.truncated(prec);
    std::vector<Scalar> c(s.coeffs());
    return BSeries(std::move(c), prec);
}

} // namespace snfdetail

inline SmithForm smith_normal_form(const BMatrix& m_in) {
    int rows = m_in.rows(), cols = m_in.cols(), prec = m_in.precision();
    SmithForm s;
    s.u = BMatrix::identity(rows, prec);
    s.v = BMatrix::identity(cols, prec);
    s.d = m_in;

    int steps = std::min(rows, cols);
    for (int t = 0; t < steps; ++t) {
        // pivot: entry of smallest valuation in the remaining block
        int pi = -1, pj = -1, pv = prec;
        for (int i = t; i < rows; ++i)
            for (int j = t; j < cols; ++j) {
                int v = s.d.at(i, j).valuation();
                if (v < pv) {
                    pv = v;
                    pi = i;
                    pj = j;
                }
            }
        if (pi < 0) break; // remaining block vanishes at precision

        if (pi != t)
            for (int j = 0; j < cols; ++j) std::swap(s.d.at(pi, j), s.d.at(t, j));
        if (pi != t)
            for (int j = 0; j < rows; ++j) std::swap(s.u.at(pi, j), s.u.at(t, j));
        if (pj != t)
            for (int i = 0; i < rows; ++i) std::swap(s.d.at(i, pj), s.d.at(i, t));
        if (pj != t)
            for (int i = 0; i < cols; ++i) std::swap(s.v.at(i, pj), s.v.at(i, t));

        // normalize the pivot to exactly b^pv: divide the row by (a lift of)
        // the unit part's inverse
        BSeries uinv = snfdetail::zero_lift(s.d.at(t, t).shifted_down(pv).inverse(), prec);
        for (int j = 0; j < cols; ++j) s.d.at(t, j) = (uinv * s.d.at(t, j)).truncated(prec);
        for (int j = 0; j < rows; ++j) s.u.at(t, j) = (uinv * s.u.at(t, j)).truncated(prec);

        // clear the column: row_i -= (entry / b^pv) * row_t
        for (int i = t + 1; i < rows; ++i) {
            const BSeries& entry = s.d.at(i, t);
            if (entry.valuation() >= prec) continue;
            BSeries q = snfdetail::zero_lift(entry.shifted_down(pv), prec); // valuation >= pv by pivot minimality
            for (int j = 0; j < cols; ++j)
                s.d.at(i, j) = (s.d.at(i, j) - q * s.d.at(t, j)).truncated(prec);
            for (int j = 0; j < rows; ++j)
                s.u.at(i, j) = (s.u.at(i, j) - q * s.u.at(t, j)).truncated(prec);
        }
        // clear the row: col_j -= (entry / b^pv) * col_t
        for (int j = t + 1; j < cols; ++j) {
            const BSeries& entry = s.d.at(t, j);
            if (entry.valuation() >= prec) continue;
            BSeries q = snfdetail::zero_lift(entry.shifted_down(pv), prec);
            for (int i = 0; i < rows; ++i)
                s.d.at(i, j) = (s.d.at(i, j) - q * s.d.at(i, t)).truncated(prec);
            for (int i = 0; i < cols; ++i)
                s.v.at(i, j) = (s.v.at(i, j) - q * s.v.at(i, t)).truncated(prec);
        }
    }

    for (int t = 0; t < steps; ++t) {
        int v = s.d.at(t, t).valuation();
        s.valuations.push_back(v);
        if (v < prec) ++s.rank;
    }
    return s;
}

/// Solves M c = x over the truncated ring when possible (divisibility of the
/// transformed right side by the diagonal); nullopt otherwise. Divided
/// coordinates take the zero lift back to the working precision.
inline std::optional<std::vector<BSeries>> snf_solve(const SmithForm& s, const std::vector<BSeries>& x) {
    int rows = s.u.rows(), cols = s.v.rows();
    std::vector<BSeries> y = s.u.apply(x);
    std::vector<BSeries> c(static_cast<size_t>(cols), BSeries::zero(s.d.precision()));
    for (int t = 0; t < std::min(rows, cols); ++t) {
        int v = (t < static_cast<int>(s.valuations.size())) ? s.valuations[static_cast<size_t>(t)]
                                                            : s.d.precision();
        const BSeries& yt = y[static_cast<size_t>(t)];
        if (v >= s.d.precision()) {
            if (!yt.is_zero()) return std::nullopt;
            continue;
        }
        if (yt.valuation() < v) return std::nullopt;
        c[static_cast<size_t>(t)] = snfdetail::zero_lift(yt.shifted_down(v), s.d.precision());
    }
    for (int t = std::min(rows, cols); t < rows; ++t)
        if (!y[static_cast<size_t>(t)].is_zero()) return std::nullopt;
    return s.v.apply(c);
}

/// Membership of x in the column span of M over the truncated ring.
inline bool in_column_span(const BMatrix& m, const std::vector<BSeries>& x) {
    SmithForm s = smith_normal_form(m);
    return snf_solve(s, x).has_value();
}

} // namespace abmod
