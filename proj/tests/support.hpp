#pragma once

// Shared helpers for the test suites: seeded random generators for scalars,
// series, gauge matrices and modules, plus independent oracles that
// cross-check the library's fast paths.

#include <random>
#include <vector>

#include "abmod/homsolver.hpp"
#include "abmod/module.hpp"

namespace testsupport {

using namespace abmod;

using Rng = std::mt19937_64;

inline Scalar random_rational(Rng& rng, int num_range = 6, int den_range = 3, bool allow_imag = false) {
    std::uniform_int_distribution<int> num(-num_range, num_range);
    std::uniform_int_distribution<int> den(1, den_range);
    int rn = num(rng), rd = den(rng);
    if (!allow_imag) return Scalar(rn, rd);
    std::uniform_int_distribution<int> coin(0, 3);
    if (coin(rng) == 0) return Scalar::make(rn, rd, num(rng), den(rng));
    return Scalar(rn, rd);
}

inline BSeries random_series(Rng& rng, int precision, int max_terms = 4, bool allow_imag = false) {
    BSeries s(precision);
    std::uniform_int_distribution<int> pos(0, std::max(precision - 1, 0));
    for (int t = 0; t < max_terms; ++t) s.set_coeff(pos(rng), random_rational(rng, 5, 3, allow_imag));
    return s;
}

inline BSeries random_unit(Rng& rng, int precision) {
    BSeries s = random_series(rng, precision, 3);
    while (s.coeff(0).is_zero()) s.set_coeff(0, random_rational(rng, 4, 2));
    return s;
}

/// Random polynomial gauge with unit determinant constant term:
/// unit-triangular times unit-triangular times a permutation.
inline BMatrix random_gauge(Rng& rng, int n, int precision) {
    BMatrix lo = BMatrix::identity(n, precision);
    BMatrix up = BMatrix::identity(n, precision);
    std::uniform_int_distribution<int> deg(0, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i > j) {
                BSeries s(precision);
                int d = deg(rng);
                s.set_coeff(d, random_rational(rng, 3, 2));
                lo.at(i, j) = s;
            } else if (i < j) {
                BSeries s(precision);
                int d = deg(rng);
                s.set_coeff(d, random_rational(rng, 3, 2));
                up.at(i, j) = s;
            }
        }
    // unit diagonal entries with a small series tail
    for (int i = 0; i < n; ++i) {
        BSeries s = BSeries::one(precision);
        if (deg(rng) == 2) s.set_coeff(1, random_rational(rng, 2, 1));
        up.at(i, i) = s;
    }
    BMatrix t = lo * up;
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    BMatrix p(n, n, precision);
    for (int i = 0; i < n; ++i) p.at(perm[static_cast<size_t>(i)], i) = BSeries::one(precision);
    return t * p;
}

inline Element random_element(Rng& rng, const ABModule& e) {
    Element x = e.zero_element();
    for (auto& s : x) s = random_series(rng, e.precision());
    return x;
}

/// Independent dense-kernel oracle for the hom solver: assembles the full
/// order-by-order linear system as one matrix (continued well past the
/// requested order, zero completion) and reads the extendable-solution
/// dimension off a plain rref kernel projected back onto orders <= N-2.
inline int dense_hom_dimension(const ABModule& e, const ABModule& f, int extra = 12) {
    int n_e = e.rank(), n_f = f.rank();
    int big_k = e.precision() - 2;
    if (big_k < 0) return 0;
    int blocks = big_k + 1 + extra;
    int d = n_e * n_f;
    QMatrix sys(blocks * d, blocks * d);
    auto idx = [&](int i, int j) { return i * n_e + j; };
    for (int m = 0; m < blocks; ++m) {
        for (int p = 0; p <= m; ++p) {
            int q = m - p;
            // L_p(X_q) = B_p X_q - X_q A_p
            for (int i = 0; i < n_f; ++i)
                for (int j = 0; j < n_e; ++j) {
                    for (int r = 0; r < n_f; ++r) {
                        Scalar c = f.a_matrix().at(i, r).coeff(p);
                        if (!c.is_zero()) sys.at(m * d + idx(i, j), q * d + idx(r, j)) += c;
                    }
                    for (int cidx = 0; cidx < n_e; ++cidx) {
                        Scalar c = e.a_matrix().at(cidx, j).coeff(p);
                        if (!c.is_zero()) sys.at(m * d + idx(i, j), q * d + idx(i, cidx)) -= c;
                    }
                }
        }
        if (m >= 1) {
            Scalar c(m - 1);
            if (!c.is_zero())
                for (int t = 0; t < d; ++t) sys.at(m * d + t, (m - 1) * d + t) += c;
        }
    }
    QMatrix ker = sys.kernel();
    // dimension of the projection onto orders 0..big_k
    int keep = (big_k + 1) * d;
    QMatrix proj(keep, ker.cols());
    for (int i = 0; i < keep; ++i)
        for (int j = 0; j < ker.cols(); ++j) proj.at(i, j) = ker.at(i, j);
    return proj.rank();
}

/// Evaluative re-check of the intertwining equation: f(a x) == a f(x) for the
/// basis and a few random elements, computed through a_apply only.
inline bool morphism_evaluation_check(const ABMorphism& f, Rng& rng, int extra_random = 2) {
    std::vector<Element> probes;
    for (int j = 0; j < f.domain().rank(); ++j) probes.push_back(f.domain().basis_element(j));
    for (int t = 0; t < extra_random; ++t) probes.push_back(random_element(rng, f.domain()));
    for (const auto& x : probes) {
        Element lhs = f.apply(a_apply(f.domain(), x));
        Element rhs = a_apply(f.codomain(), f.apply(x));
        Element diff = sub_elements(lhs, rhs);
        int p = std::min(f.matrix().precision(), f.domain().precision() - 1);
        for (auto& s : diff) s = s.truncated(std::min(p, s.precision()));
        if (!element_is_zero(diff)) return false;
    }
    return true;
}

} // namespace testsupport
