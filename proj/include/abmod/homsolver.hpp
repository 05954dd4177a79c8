#pragma once

#include <optional>
#include <random>

#include "morphism.hpp"
#include "qroots.hpp"

namespace abmod {

/// A scalar-field basis of the space of (a,b)-morphisms E -> F at the working
/// precision. `stable` certifies that the reported dimension agrees across
/// precisions and clears the resonance bound, so it equals the true dimension
/// for simple-pole presentations.
struct HomBasis {
    std::vector<ABMorphism> morphisms;
    int dim = 0;
    bool stable = false;
};

namespace homdetail {

/// vec(M)[i*n_e + j] = M[i][j]; matrix of X |-> B_p X - X A_p on vec coords.
inline QMatrix sylvester_block(const QMatrix& bp, const QMatrix& ap, int n_f, int n_e) {
    int d = n_f * n_e;
    QMatrix l(d, d);
    for (int i = 0; i < n_f; ++i)
        for (int j = 0; j < n_e; ++j) {
            int row = i * n_e + j;
            for (int r = 0; r < n_f; ++r) {
                const Scalar& c = bp.at(i, r);
                if (!c.is_zero()) l.at(row, r * n_e + j) += c;
            }
            for (int c2 = 0; c2 < n_e; ++c2) {
                const Scalar& c = ap.at(c2, j);
                if (!c.is_zero()) l.at(row, i * n_e + c2) -= c;
            }
        }
    return l;
}

inline QMatrix coeff_qmatrix(const BMatrix& m, int k) {
    return QMatrix(m.rows(), m.cols(), m.coeff_matrix(k));
}

inline bool is_nilpotent(const QMatrix& m) {
    QMatrix p = m;
    for (int k = 1; k < m.rows(); ++k) p = p * m;
    return p.is_zero();
}

/// Forward elimination through the block-triangular system
///   L_0(X_m) + sum_{p=1..m} L_p(X_{m-p}) + (m-1) X_{m-1} = 0,
/// keeping the full solution set of the orders processed so far as a
/// parametrization (X_0..X_m) = C * t. When the constant terms are nonzero
/// the orders couple, so consistency constraints on the parameters are
/// tracked exactly instead of assuming forward substitution works.
struct Parametrization {
    std::vector<QMatrix> lp; // L_p operators, zero beyond the presentation
    std::vector<QMatrix> blocks; // C_0..C_m, each d x params
    int params = 0;
    int d = 0;

    Parametrization(const ABModule& e, const ABModule& f, int max_order) {
        int n_e = e.rank(), n_f = f.rank();
        d = n_f * n_e;
        for (int p = 0; p <= max_order; ++p)
            lp.push_back(sylvester_block(coeff_qmatrix(f.a_matrix(), p), coeff_qmatrix(e.a_matrix(), p),
                                         n_f, n_e));
    }

    /// Processes the next order's equation, growing the parametrization.
    void extend_one() {
        int m = static_cast<int>(blocks.size());
        int k = params;
        QMatrix rhs(d, k);
        for (int p = 1; p <= m && p < static_cast<int>(lp.size()); ++p)
            rhs = rhs - lp[static_cast<size_t>(p)] * blocks[static_cast<size_t>(m - p)];
        if (m >= 2) rhs = rhs + Scalar(1 - m) * blocks[static_cast<size_t>(m - 1)];

        // row-reduce [L_0 | rhs]
        QMatrix aug(d, d + k);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) aug.at(i, j) = lp[0].at(i, j);
            for (int j = 0; j < k; ++j) aug.at(i, d + j) = rhs.at(i, j);
        }
        std::vector<int> piv = aug.rref();
        std::vector<int> l0_pivots;
        std::vector<int> consistency_rows;
        for (size_t r = 0; r < piv.size(); ++r) {
            if (piv[r] < d)
                l0_pivots.push_back(static_cast<int>(r));
            else
                consistency_rows.push_back(static_cast<int>(r));
        }
        std::vector<bool> is_piv_col(static_cast<size_t>(d), false);
        for (int r : l0_pivots) is_piv_col[static_cast<size_t>(piv[static_cast<size_t>(r)])] = true;

        // shrink the parameter space by the consistency constraints
        QMatrix q = QMatrix::identity(k);
        if (!consistency_rows.empty()) {
            QMatrix z(static_cast<int>(consistency_rows.size()), k);
            for (size_t zi = 0; zi < consistency_rows.size(); ++zi)
                for (int j = 0; j < k; ++j)
                    z.at(static_cast<int>(zi), j) = aug.at(consistency_rows[zi], d + j);
            q = z.kernel();
        }
        int k2 = q.cols();

        // X_m = W t + G u over surviving params t and fresh params u
        std::vector<int> free_cols;
        for (int c = 0; c < d; ++c)
            if (!is_piv_col[static_cast<size_t>(c)]) free_cols.push_back(c);
        int fresh = static_cast<int>(free_cols.size());

        QMatrix w(d, k);
        QMatrix g(d, fresh);
        for (int r : l0_pivots) {
            int pc = piv[static_cast<size_t>(r)];
            for (int j = 0; j < k; ++j) w.at(pc, j) = aug.at(r, d + j);
            for (int fi = 0; fi < fresh; ++fi) {
                const Scalar& c = aug.at(r, free_cols[static_cast<size_t>(fi)]);
                if (!c.is_zero()) g.at(pc, fi) = -c;
            }
        }
        for (int fi = 0; fi < fresh; ++fi) g.at(free_cols[static_cast<size_t>(fi)], fi) = Scalar(1);

        // update previous blocks (shrunk params, zero-padded for fresh ones)
        for (auto& c : blocks) {
            QMatrix shrunk = c * q;
            QMatrix padded(d, k2 + fresh);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < k2; ++j) padded.at(i, j) = shrunk.at(i, j);
            c = std::move(padded);
        }
        QMatrix wq = w * q;
        QMatrix cm(d, k2 + fresh);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < k2; ++j) cm.at(i, j) = wq.at(i, j);
            for (int j = 0; j < fresh; ++j) cm.at(i, k2 + j) = g.at(i, j);
        }
        blocks.push_back(std::move(cm));
        params = k2 + fresh;
    }

    void extend_to(int order) {
        while (static_cast<int>(blocks.size()) <= order) extend_one();
    }

    /// Parameter directions whose projections to blocks 0..keep-1 are
    /// linearly independent (pivot columns of the stacked projection).
    std::vector<std::vector<Scalar>> projected_basis(int keep) const {
        keep = std::min(keep, static_cast<int>(blocks.size()));
        if (keep <= 0 || params == 0) return {};
        QMatrix stack(keep * d, params);
        for (int q = 0; q < keep; ++q)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < params; ++j) stack.at(q * d + i, j) = blocks[static_cast<size_t>(q)].at(i, j);
        std::vector<int> piv = stack.rref();
        std::vector<std::vector<Scalar>> dirs;
        for (int c : piv) {
            std::vector<Scalar> dir(static_cast<size_t>(params));
            dir[static_cast<size_t>(c)] = Scalar(1);
            dirs.push_back(std::move(dir));
        }
        return dirs;
    }
};

/// How far past the requested order the elimination runs before the first
/// dimension readout, and the hard cap. Solutions of the truncated system
/// that cannot be continued (truncation tails) die off within a few orders;
/// the readout is accepted once it stops changing under further extension.
constexpr int kExtendStep = 3;
constexpr int kExtendStart = 6;
constexpr int kExtendMax = 24;

struct ProjectedSolve {
    Parametrization st;
    std::vector<std::vector<Scalar>> dirs;
    bool converged = false;
};

inline ProjectedSolve projected_solve(const ABModule& e, const ABModule& f, int big_k) {
    ProjectedSolve out{Parametrization(e, f, big_k + kExtendMax), {}, false};
    out.st.extend_to(big_k + kExtendStart);
    out.dirs = out.st.projected_basis(big_k + 1);
    for (int extra = kExtendStart + kExtendStep; extra <= kExtendMax; extra += kExtendStep) {
        out.st.extend_to(big_k + extra);
        auto next = out.st.projected_basis(big_k + 1);
        if (next.size() == out.dirs.size()) {
            out.dirs = std::move(next);
            out.converged = true;
            break;
        }
        out.dirs = std::move(next);
    }
    return out;
}

inline int projected_dim(const ABModule& e, const ABModule& f) {
    int big_k = std::min(e.precision(), f.precision()) - 2;
    if (big_k < 0) return 0;
    return static_cast<int>(projected_solve(e, f, big_k).dirs.size());
}

/// Largest non-negative integer resonance of the pair (A_1, B_1): integer
/// eigenvalue differences alpha - beta, located by exact determinant tests
/// under a Gershgorin bound.
inline int max_integer_resonance(const ABModule& e, const ABModule& f) {
    int n_e = e.rank(), n_f = f.rank();
    QMatrix syl = Scalar(-1) * sylvester_block(coeff_qmatrix(f.a_matrix(), 1), coeff_qmatrix(e.a_matrix(), 1),
                                               n_f, n_e); // X A_1 - B_1 X
    int d = syl.rows();
    mpq_class bound(0);
    for (int i = 0; i < d; ++i) {
        mpq_class row(0);
        for (int j = 0; j < d; ++j) {
            row += abs(syl.at(i, j).re()) + abs(syl.at(i, j).im());
        }
        bound = std::max(bound, row);
    }
    long kmax = static_cast<long>(mpz_class(bound.get_num() / bound.get_den()).get_si()) + 1;
    int best = 0;
    for (long k = 0; k <= kmax; ++k) {
        QMatrix shifted = syl;
        for (int i = 0; i < d; ++i) shifted.at(i, i) -= Scalar(k);
        if (shifted.det().is_zero()) best = static_cast<int>(k);
    }
    return best;
}

} // namespace homdetail

/// Basis of all morphism matrices M(b) mod b^{N-1} with B M + b^2 M' = M A,
/// assembled from the order-by-order equations into one exact linear system
/// over the scalar field. The system is continued past the requested order
/// (with the zero completion of the presentation) until the projected
/// dimension stabilizes, which filters out truncation tails that satisfy the
/// visible equations but do not extend. Every returned morphism is
/// re-verified against the intertwining equation.
inline HomBasis solve_hom(const ABModule& e, const ABModule& f) {
    if (e.precision() != f.precision()) throw PrecisionMismatch("solve_hom: precision mismatch");
    int n = e.precision();
    int big_k = n - 2;
    HomBasis out;
    if (big_k < 0) return out;

    auto sol = homdetail::projected_solve(e, f, big_k);
    out.dim = static_cast<int>(sol.dirs.size());

    for (const auto& dir : sol.dirs) {
        BMatrix m(f.rank(), e.rank(), n - 1);
        for (int q = 0; q <= big_k; ++q) {
            const QMatrix& c = sol.st.blocks[static_cast<size_t>(q)];
            for (int i = 0; i < f.rank(); ++i)
                for (int j = 0; j < e.rank(); ++j) {
                    Scalar v;
                    for (int t = 0; t < sol.st.params; ++t) {
                        if (dir[static_cast<size_t>(t)].is_zero()) continue;
                        v += c.at(i * e.rank() + j, t) * dir[static_cast<size_t>(t)];
                    }
                    if (!v.is_zero()) {
                        BSeries s = m.at(i, j);
                        s.set_coeff(q, v);
                        m.at(i, j) = s;
                    }
                }
        }
        ABMorphism phi(e, f, std::move(m));
        if (!phi.verify()) throw Error("solve_hom: internal error, solution fails the intertwining oracle");
        out.morphisms.push_back(std::move(phi));
    }

    // stability: convergence of the extension, dimension agreement at one
    // precision lower, plus the resonance bound when both constant terms are
    // nilpotent
    bool dims_agree = sol.converged;
    if (n >= 3) {
        ABModule e1(e.a_matrix().truncated(n - 1), e.labels());
        ABModule f1(f.a_matrix().truncated(n - 1), f.labels());
        dims_agree = dims_agree && homdetail::projected_dim(e1, f1) == out.dim;
    }
    bool resonance_ok = true;
    QMatrix a0 = homdetail::coeff_qmatrix(e.a_matrix(), 0);
    QMatrix b0 = homdetail::coeff_qmatrix(f.a_matrix(), 0);
    if (homdetail::is_nilpotent(a0) && homdetail::is_nilpotent(b0)) {
        int bound = 2 + homdetail::max_integer_resonance(e, f);
        resonance_ok = n > bound;
    }
    out.stable = dims_agree && resonance_ok;
    return out;
}

// ---------------------------------------------------------------------------
// isomorphism testing
// ---------------------------------------------------------------------------

enum class IsoVerdict { yes, no, inconclusive };

struct IsoResult {
    IsoVerdict verdict = IsoVerdict::no;
    std::optional<ABMorphism> witness;
    int hom_dim = 0;
};

namespace homdetail {

/// Is there a combination sum t_i P_i with nonzero determinant? The search is
/// exact (grid polynomial identity testing) for spaces of dimension <= 4 and
/// randomized with `trials` draws otherwise. Returns the combination when one
/// is found; `certain` reports whether an empty answer is a proof.
struct NondegSearch {
    std::optional<std::vector<Scalar>> combo;
    bool certain = false;
};

inline NondegSearch find_nondegenerate(const std::vector<QMatrix>& mats, int trials, unsigned long seed) {
    NondegSearch res;
    if (mats.empty()) {
        res.certain = true;
        return res;
    }
    int dim = static_cast<int>(mats.size());
    int n = mats[0].rows();
    auto det_of = [&](const std::vector<Scalar>& t) {
        QMatrix m(n, n);
        for (int i = 0; i < dim; ++i) {
            if (t[static_cast<size_t>(i)].is_zero()) continue;
            m = m + t[static_cast<size_t>(i)] * mats[static_cast<size_t>(i)];
        }
        return m.det();
    };
    for (int i = 0; i < dim; ++i) {
        std::vector<Scalar> t(static_cast<size_t>(dim));
        t[static_cast<size_t>(i)] = Scalar(1);
        if (!det_of(t).is_zero()) {
            res.combo = t;
            res.certain = true;
            return res;
        }
    }
    double grid_cost = 1.0;
    for (int i = 0; i < dim; ++i) grid_cost *= n + 1;
    if (dim <= 4 && grid_cost <= 200000.0) {
        // det is a polynomial of degree <= n in each t_i; vanishing on the
        // grid {0..n}^dim proves it is identically zero
        std::vector<int> idx(static_cast<size_t>(dim), 0);
        while (true) {
            std::vector<Scalar> t(static_cast<size_t>(dim));
            for (int i = 0; i < dim; ++i) t[static_cast<size_t>(i)] = Scalar(idx[static_cast<size_t>(i)]);
            if (!det_of(t).is_zero()) {
                res.combo = t;
                res.certain = true;
                return res;
            }
            int c = 0;
            while (c < dim && ++idx[static_cast<size_t>(c)] > n) idx[static_cast<size_t>(c++)] = 0;
            if (c == dim) break;
        }
        res.certain = true;
        return res;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> box(-1000000, 1000000);
    for (int t = 0; t < trials; ++t) {
        std::vector<Scalar> v(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i) v[static_cast<size_t>(i)] = Scalar(box(rng));
        if (!det_of(v).is_zero()) {
            res.combo = v;
            res.certain = true;
            return res;
        }
    }
    res.certain = false; // random misses are evidence, not proof
    return res;
}

} // namespace homdetail

/// Decides E ~ F by searching Hom(E,F) for an invertible element. "no" is
/// exact when the search space is small enough for grid identity testing;
/// larger spaces fall back to seeded random evaluation and report
/// `inconclusive` when every draw is singular.
inline IsoResult are_isomorphic(const ABModule& e, const ABModule& f, int trials = 32,
                                unsigned long seed = 1) {
    IsoResult res;
    if (e.rank() != f.rank()) return res; // different ranks: certainly not isomorphic
    if (e.precision() != f.precision()) throw PrecisionMismatch("are_isomorphic: precision mismatch");
    HomBasis homs = solve_hom(e, f);
    res.hom_dim = homs.dim;
    if (homs.dim == 0) return res;

    std::vector<QMatrix> consts;
    for (const auto& m : homs.morphisms)
        consts.emplace_back(f.rank(), e.rank(), m.matrix().constant_term());
    auto search = homdetail::find_nondegenerate(consts, trials, seed);
    if (search.combo) {
        ABMorphism w = Scalar(0) * homs.morphisms[0];
        for (size_t i = 0; i < homs.morphisms.size(); ++i)
            w = w + (*search.combo)[i] * homs.morphisms[i];
        if (!is_invertible(w)) throw Error("are_isomorphic: internal witness inconsistency");
        w.verify();
        res.verdict = IsoVerdict::yes;
        res.witness = w;
        return res;
    }
    res.verdict = search.certain ? IsoVerdict::no : IsoVerdict::inconclusive;
    return res;
}

} // namespace abmod
