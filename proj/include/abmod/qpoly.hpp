#pragma once

#include <vector>

#include "scalar.hpp"

namespace abmod {

/// Exact polynomials over the scalar field, coefficients lowest degree first.
/// Just enough arithmetic for characteristic polynomials, Bezout identities
/// and spectral projectors.
namespace qpoly {

using Poly = std::vector<Scalar>;

inline void trim(Poly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline bool is_zero(const Poly& p) {
    for (const auto& c : p)
        if (!c.is_zero()) return false;
    return true;
}

inline Scalar eval(const Poly& p, const Scalar& x) {
    Scalar r;
    for (size_t k = p.size(); k-- > 0;) r = r * x + p[k];
    return r;
}

inline Poly add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()));
    for (size_t k = 0; k < r.size(); ++k) {
        if (k < a.size()) r[k] += a[k];
        if (k < b.size()) r[k] += b[k];
    }
    trim(r);
    return r;
}

inline Poly scale(const Scalar& c, const Poly& a) {
    Poly r(a);
    for (auto& x : r) x = c * x;
    trim(r);
    return r;
}

inline Poly sub(const Poly& a, const Poly& b) { return add(a, scale(Scalar(-1), b)); }

inline Poly mul(const Poly& a, const Poly& b) {
    if (is_zero(a) || is_zero(b)) return {};
    Poly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

/// Euclidean division a = q*b + r with deg r < deg b. Requires b != 0.
inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b) {
    trim(a);
    Poly bb(b);
    trim(bb);
    Poly q;
    if (bb.empty()) throw Error("polynomial division by zero");
    if (a.size() >= bb.size()) q.assign(a.size() - bb.size() + 1, Scalar(0));
    Scalar lead_inv = Scalar(1) / bb.back();
    while (a.size() >= bb.size() && !a.empty()) {
        Scalar c = a.back() * lead_inv;
        size_t shift = a.size() - bb.size();
        q[shift] = c;
        for (size_t k = 0; k < bb.size(); ++k) a[shift + k] -= c * bb[k];
        trim(a);
        if (a.size() < bb.size()) break;
    }
    trim(q);
    return {q, a};
}

/// Monic gcd via the Euclidean algorithm.
inline Poly gcd(Poly a, Poly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) a = scale(Scalar(1) / a.back(), a);
    return a;
}

/// Extended Euclid: returns (g, u, v) monic with u*a + v*b = g.
inline std::tuple<Poly, Poly, Poly> xgcd(Poly a, Poly b) {
    Poly r0 = a, r1 = b;
    trim(r0);
    trim(r1);
    Poly s0{Scalar(1)}, s1{}, t0{}, t1{Scalar(1)};
    while (!r1.empty()) {
        auto [q, r] = divmod(r0, r1);
        Poly s2 = sub(s0, mul(q, s1));
        Poly t2 = sub(t0, mul(q, t1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (!r0.empty()) {
        Scalar inv = Scalar(1) / r0.back();
        r0 = scale(inv, r0);
        s0 = scale(inv, s0);
        t0 = scale(inv, t0);
    }
    return {r0, s0, t0};
}

/// Squarefree part p / gcd(p, p').
inline Poly squarefree_part(const Poly& p) {
    Poly d;
    for (size_t k = 1; k < p.size(); ++k) d.push_back(Scalar(static_cast<long>(k)) * p[k]);
    trim(d);
    if (d.empty()) return p;
    Poly g = gcd(p, d);
    if (degree(g) <= 0) return p;
    return divmod(p, g).first;
}

} // namespace qpoly

} // namespace abmod
